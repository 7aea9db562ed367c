"""Lenient reader for Common Voice metadata TSVs.

The age column holds decade tokens ("twenties", "thirties", ...)
which map to decade midpoints so that bucket-labeled speech and
exact-age video data share one labeling path. Malformed rows are
collected as issues rather than aborting the parse; a missing
required column aborts, since nothing after the header could be
trusted.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from voiceage.errors import SchemaError

REQUIRED_COLUMNS = ("path", "age", "gender")

AGE_BUCKET_AGES: dict[str, int] = {
    "teens": 15,
    "twenties": 25,
    "thirties": 35,
    "fourties": 45,
    "forties": 45,
    "fifties": 55,
    "sixties": 65,
    "seventies": 75,
    "eighties": 85,
    "nineties": 95,
}


@dataclass(frozen=True)
class CommonVoiceRow:
    clip_path: str
    age_bucket: str
    gender: str
    accent: str

    @property
    def representative_age(self) -> int | None:
        """Decade midpoint, or None for unlabeled rows."""
        return AGE_BUCKET_AGES.get(self.age_bucket)

    @property
    def labeled(self) -> bool:
        return self.age_bucket in AGE_BUCKET_AGES


@dataclass(frozen=True)
class ParseIssue:
    line_number: int
    message: str


@dataclass(frozen=True)
class ParseResult:
    rows: list[CommonVoiceRow]
    issues: list[ParseIssue]


def parse_common_voice(text: str) -> ParseResult:
    """Parse a TSV export; returns surviving rows plus row-level issues."""
    reader = csv.reader(io.StringIO(text), delimiter="\t")
    try:
        header = next(reader)
    except StopIteration:
        raise SchemaError("empty file: no header row") from None
    columns = {name: i for i, name in enumerate(header)}
    missing = [c for c in REQUIRED_COLUMNS if c not in columns]
    if missing:
        raise SchemaError(f"missing required columns: {missing}")
    accent_col = columns.get("accent", columns.get("accents"))

    rows: list[CommonVoiceRow] = []
    issues: list[ParseIssue] = []
    for line_number, fields in enumerate(reader, start=2):
        if not fields:
            continue
        if len(fields) != len(header):
            issues.append(
                ParseIssue(line_number, f"expected {len(header)} fields, got {len(fields)}")
            )
            continue
        bucket = fields[columns["age"]].strip()
        if bucket and bucket not in AGE_BUCKET_AGES:
            issues.append(ParseIssue(line_number, f"unknown age bucket {bucket!r}"))
            continue
        rows.append(
            CommonVoiceRow(
                clip_path=fields[columns["path"]],
                age_bucket=bucket,
                gender=fields[columns["gender"]].strip(),
                accent=fields[accent_col].strip() if accent_col is not None else "",
            )
        )
    return ParseResult(rows, issues)
