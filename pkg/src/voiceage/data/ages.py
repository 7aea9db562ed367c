"""Age labels from calendar dates."""

from __future__ import annotations

from datetime import date

from voiceage.errors import ChronologyError


def compute_age(birth: date, recorded: date) -> int:
    """Full years elapsed from birth to recording.

    A birthday that has not yet arrived in the recording year
    subtracts one. A Feb 29 birthday counts from Mar 1 in common
    years.
    """
    if recorded < birth:
        raise ChronologyError(f"recorded {recorded} precedes birth {birth}")
    years = recorded.year - birth.year
    if (recorded.month, recorded.day) < (birth.month, birth.day):
        years -= 1
    return years
