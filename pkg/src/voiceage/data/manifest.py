"""Manifest assembly: capped video selection, splits, and file I/O.

A manifest is a line-delimited UTF-8 text file with one header line
and tab-separated fields (audio_segment_path, face_crop_path, age,
speaker_id, split); a lone "-" marks a missing face crop. Assembly
sorts every input, so the result is independent of file listing
order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from datetime import date
from pathlib import Path

from voiceage.data.ages import compute_age
from voiceage.errors import FormatError, StratificationError, ValidationError
from voiceage.models.bins import AgeBinScheme, age_to_bin
from voiceage.nn.rng import derive_rng

MANIFEST_HEADER = "audio_segment_path\tface_crop_path\tage\tspeaker_id\tsplit"
SPLITS = ("train", "test")


@dataclass(frozen=True)
class SpeakerRecord:
    speaker_id: str
    birth_date: date
    name: str = ""


@dataclass(frozen=True)
class VideoRecord:
    video_id: str
    speaker_id: str
    recorded_date: date
    media_path: str = ""


@dataclass(frozen=True)
class ManifestEntry:
    audio_segment_path: str
    face_crop_path: str | None
    age: int
    speaker_id: str
    split: str = "train"

    def __post_init__(self) -> None:
        if self.age < 0:
            raise ValidationError(f"age must be >= 0, got {self.age}")
        if self.split not in SPLITS:
            raise ValidationError(f"split must be one of {SPLITS}, got {self.split!r}")

    def line(self) -> str:
        face = self.face_crop_path if self.face_crop_path is not None else "-"
        return f"{self.audio_segment_path}\t{face}\t{self.age}\t{self.speaker_id}\t{self.split}"


def resolve_recorded_date(
    title_date: date | None,
    description_date: date | None,
    published_date: date | None,
) -> date | None:
    """Recording-date precedence: title, then description, then published."""
    for candidate in (title_date, description_date, published_date):
        if candidate is not None:
            return candidate
    return None


def build_manifest(
    speakers: list[SpeakerRecord],
    videos: list[VideoRecord],
    cap_per_speaker: int,
    segment_index: dict[str, list[tuple[str, str | None]]],
) -> tuple[list[ManifestEntry], list[str]]:
    """At most cap_per_speaker videos each, lowest video_id first.

    Returns (entries, warnings); a video whose speaker is unknown is
    skipped with a warning rather than failing the build.
    """
    if cap_per_speaker < 0:
        raise ValidationError(f"cap_per_speaker must be >= 0, got {cap_per_speaker}")
    by_speaker: dict[str, SpeakerRecord] = {s.speaker_id: s for s in speakers}
    grouped: dict[str, list[VideoRecord]] = {}
    warnings: list[str] = []
    for video in sorted(videos, key=lambda v: (v.speaker_id, v.video_id)):
        if video.speaker_id not in by_speaker:
            warnings.append(
                f"video {video.video_id}: speaker {video.speaker_id} has no birth date, skipped"
            )
            continue
        grouped.setdefault(video.speaker_id, []).append(video)

    entries: list[ManifestEntry] = []
    for speaker_id in sorted(grouped):
        birth = by_speaker[speaker_id].birth_date
        for video in grouped[speaker_id][:cap_per_speaker]:
            age = compute_age(birth, video.recorded_date)
            for audio_path, face_path in sorted(
                segment_index.get(video.video_id, []), key=lambda pair: pair[0]
            ):
                entries.append(
                    ManifestEntry(
                        audio_segment_path=audio_path,
                        face_crop_path=face_path,
                        age=age,
                        speaker_id=speaker_id,
                    )
                )
    return entries, warnings


def split_holdout(
    entries: list[ManifestEntry],
    test_size: int,
    seed: int,
    stratified_scheme: AgeBinScheme | None = None,
    speaker_disjoint: bool = False,
) -> list[ManifestEntry]:
    """Seeded uniform holdout; the rest stays train.

    With speaker_disjoint, whole speakers move to test in seeded
    order until at least test_size entries are held out, so no
    speaker straddles the split; the test set may then exceed
    test_size by part of one speaker.

    With a stratification scheme, every class present in the full
    manifest must survive in the train split.
    """
    if not 0 <= test_size < len(entries):
        raise ValidationError(
            f"test_size must be in [0, {len(entries)}), got {test_size}"
        )
    rng = derive_rng(seed, "holdout")
    if speaker_disjoint:
        speakers = sorted({e.speaker_id for e in entries})
        per_speaker: dict[str, int] = {}
        for entry in entries:
            per_speaker[entry.speaker_id] = per_speaker.get(entry.speaker_id, 0) + 1
        test_speakers: set[str] = set()
        held_out = 0
        for index in rng.permutation(len(speakers)):
            if held_out >= test_size:
                break
            speaker = speakers[int(index)]
            test_speakers.add(speaker)
            held_out += per_speaker[speaker]
        if held_out == len(entries):
            raise ValidationError(
                "speaker-disjoint holdout left no training entries"
            )
        test_idx = {i for i, e in enumerate(entries) if e.speaker_id in test_speakers}
    else:
        test_idx = set(rng.choice(len(entries), size=test_size, replace=False).tolist())
    result = [
        replace(entry, split="test" if i in test_idx else "train")
        for i, entry in enumerate(entries)
    ]
    if stratified_scheme is not None:
        all_classes = {age_to_bin(e.age, stratified_scheme) for e in entries}
        train_classes = {
            age_to_bin(e.age, stratified_scheme) for e in result if e.split == "train"
        }
        missing = sorted(c for c in all_classes - train_classes if c is not None)
        if missing:
            raise StratificationError(
                f"classes missing from train split under {stratified_scheme.name}: {missing}"
            )
    return result


def write_manifest(entries: list[ManifestEntry], path: str | Path) -> None:
    lines = [MANIFEST_HEADER] + [e.line() for e in entries]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_manifest(path: str | Path) -> list[ManifestEntry]:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or lines[0] != MANIFEST_HEADER:
        raise FormatError(f"manifest missing header line {MANIFEST_HEADER!r}")
    entries = []
    for number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 5:
            raise FormatError(f"line {number}: expected 5 fields, got {len(fields)}")
        audio, face, age_text, speaker_id, split = fields
        try:
            age = int(age_text)
        except ValueError:
            raise FormatError(f"line {number}: age {age_text!r} is not an integer") from None
        entries.append(
            ManifestEntry(
                audio_segment_path=audio,
                face_crop_path=None if face == "-" else face,
                age=age,
                speaker_id=speaker_id,
                split=split,
            )
        )
    return entries


def load_speakers(path: str | Path) -> list[SpeakerRecord]:
    """JSON list of {speaker_id, birth_date, name?}; dates ISO format."""
    try:
        records = json.loads(Path(path).read_text(encoding="utf-8"))
        return [
            SpeakerRecord(
                speaker_id=r["speaker_id"],
                birth_date=date.fromisoformat(r["birth_date"]),
                name=r.get("name", ""),
            )
            for r in records
        ]
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"unreadable speaker metadata at {path}: {exc}") from exc


def load_videos(path: str | Path) -> list[VideoRecord]:
    """JSON list of {video_id, speaker_id, dates...}.

    The recorded date comes from title_date, description_date, or
    published_date, in that precedence; a plain recorded_date field
    wins over all three. Videos with no usable date are dropped.
    """
    try:
        records = json.loads(Path(path).read_text(encoding="utf-8"))
    except (json.JSONDecodeError, OSError) as exc:
        raise FormatError(f"unreadable video metadata at {path}: {exc}") from exc
    videos = []
    for r in records:
        try:
            def parse(key: str) -> date | None:
                value = r.get(key)
                return date.fromisoformat(value) if value else None

            recorded = parse("recorded_date") or resolve_recorded_date(
                parse("title_date"), parse("description_date"), parse("published_date")
            )
            if recorded is None:
                continue
            videos.append(
                VideoRecord(
                    video_id=r["video_id"],
                    speaker_id=r["speaker_id"],
                    recorded_date=recorded,
                    media_path=r.get("media_path", ""),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad video record {r!r}: {exc}") from exc
    return videos
