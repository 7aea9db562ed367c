"""Dataset composition reports."""

from __future__ import annotations

from dataclasses import dataclass, field

from voiceage.data.manifest import ManifestEntry
from voiceage.models.bins import SCHEMES, age_to_bin


@dataclass(frozen=True)
class StatsReport:
    total: int
    age_histogram: dict[int, int]
    scheme_counts: dict[str, dict[str, int]]
    share_30_60: float
    gender_counts: dict[str, int] = field(default_factory=dict)

    def to_csv(self) -> str:
        lines = ["section,key,value", f"summary,total,{self.total}"]
        lines.append(f"summary,share_30_60,{self.share_30_60:.4f}")
        for age, count in self.age_histogram.items():
            lines.append(f"age,{age},{count}")
        for scheme_name, counts in self.scheme_counts.items():
            for label, count in counts.items():
                lines.append(f"bins_{scheme_name},{label},{count}")
        for gender, count in sorted(self.gender_counts.items()):
            lines.append(f"gender,{gender},{count}")
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        lines = [f"entries: {self.total}"]
        lines.append(f"share aged 30-60: {self.share_30_60:.1%}")
        if self.age_histogram:
            ages = sorted(self.age_histogram)
            lines.append(f"age range: {ages[0]}-{ages[-1]}")
        for scheme_name, counts in self.scheme_counts.items():
            parts = ", ".join(f"{label}: {count}" for label, count in counts.items())
            lines.append(f"{scheme_name}: {parts}")
        if self.gender_counts:
            total = sum(self.gender_counts.values())
            parts = ", ".join(
                f"{g}: {c} ({c / total:.0%})" for g, c in sorted(self.gender_counts.items())
            )
            lines.append(f"gender: {parts}")
        return "\n".join(lines) + "\n"


def dataset_stats(
    entries: list[ManifestEntry], genders: list[str] | None = None
) -> StatsReport:
    """Histogram, per-scheme bin counts, and the 30-60 share.

    An empty manifest yields an all-zero report rather than dividing
    by zero.
    """
    histogram: dict[int, int] = {}
    for entry in entries:
        histogram[entry.age] = histogram.get(entry.age, 0) + 1
    histogram = dict(sorted(histogram.items()))

    scheme_counts: dict[str, dict[str, int]] = {}
    for scheme in SCHEMES.values():
        counts = {label: 0 for label in scheme.labels}
        for entry in entries:
            bin_index = age_to_bin(entry.age, scheme)
            if bin_index is not None:
                counts[scheme.labels[bin_index]] += 1
        scheme_counts[scheme.name] = counts

    total = len(entries)
    in_range = sum(1 for e in entries if 30 <= e.age <= 60)
    share = in_range / total if total else 0.0

    gender_counts: dict[str, int] = {}
    for gender in genders or ():
        if gender:
            gender_counts[gender] = gender_counts.get(gender, 0) + 1
    return StatsReport(
        total=total,
        age_histogram=histogram,
        scheme_counts=scheme_counts,
        share_30_60=share,
        gender_counts=gender_counts,
    )
