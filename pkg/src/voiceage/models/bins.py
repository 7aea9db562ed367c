"""Age binning schemes.

Three tasks share one rule: a bin index is the count of boundary ages
at or below the given age. The two-class scheme additionally excludes
a middle range, returning None for ages that belong to no class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from voiceage.errors import RangeError, ValidationError


@dataclass(frozen=True)
class AgeBinScheme:
    """Ordered age cutoffs plus display labels, one per bin."""

    name: str
    boundaries: tuple[int, ...]
    labels: tuple[str, ...]
    excluded: tuple[int, int] | None = None

    def __post_init__(self) -> None:
        if list(self.boundaries) != sorted(set(self.boundaries)):
            raise ValidationError(f"boundaries must be strictly ascending: {self.boundaries}")
        if len(self.labels) != len(self.boundaries) + 1:
            raise ValidationError(
                f"need {len(self.boundaries) + 1} labels, got {len(self.labels)}"
            )
        if self.excluded is not None and self.excluded[0] > self.excluded[1]:
            raise ValidationError(f"excluded range reversed: {self.excluded}")

    @property
    def class_count(self) -> int:
        return len(self.labels)


DECADE10 = AgeBinScheme(
    name="decade10",
    boundaries=(20, 30, 40, 50, 60, 70),
    labels=("<20", "20-29", "30-39", "40-49", "50-59", "60-69", ">=70"),
)

QUARTER25 = AgeBinScheme(
    name="quarter25",
    boundaries=(26, 51, 76),
    labels=("<=25", "26-50", "51-75", ">75"),
)

# ages 26-60 belong to neither class and are dropped from this task
AB = AgeBinScheme(
    name="ab",
    boundaries=(26,),
    labels=("A", "B"),
    excluded=(26, 60),
)

SCHEMES: dict[str, AgeBinScheme] = {s.name: s for s in (DECADE10, QUARTER25, AB)}


def age_to_bin(age: float, scheme: AgeBinScheme) -> int | None:
    """Class index for an age, or None when the scheme excludes it."""
    if not math.isfinite(age) or age < 0:
        raise RangeError(f"age must be finite and >= 0, got {age}")
    if scheme.excluded is not None and scheme.excluded[0] <= age <= scheme.excluded[1]:
        return None
    return sum(age >= b for b in scheme.boundaries)
