from voiceage.data.ages import compute_age
from voiceage.data.common_voice import (
    AGE_BUCKET_AGES,
    CommonVoiceRow,
    ParseIssue,
    ParseResult,
    parse_common_voice,
)
from voiceage.data.manifest import (
    MANIFEST_HEADER,
    ManifestEntry,
    SpeakerRecord,
    VideoRecord,
    build_manifest,
    load_speakers,
    load_videos,
    read_manifest,
    resolve_recorded_date,
    split_holdout,
    write_manifest,
)
from voiceage.data.stats import StatsReport, dataset_stats
from voiceage.data.features import dataset_from_manifest

__all__ = [
    "AGE_BUCKET_AGES",
    "CommonVoiceRow",
    "MANIFEST_HEADER",
    "ManifestEntry",
    "ParseIssue",
    "ParseResult",
    "SpeakerRecord",
    "StatsReport",
    "VideoRecord",
    "build_manifest",
    "compute_age",
    "dataset_from_manifest",
    "dataset_stats",
    "load_speakers",
    "load_videos",
    "parse_common_voice",
    "read_manifest",
    "resolve_recorded_date",
    "split_holdout",
    "write_manifest",
]
