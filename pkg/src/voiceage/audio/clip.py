"""Audio clips: the unit of ingestion, segmentation, and playback."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from voiceage import SAMPLE_RATE, SEGMENT_SECONDS
from voiceage.errors import ValidationError


@dataclass(frozen=True)
class AudioClip:
    """Mono PCM audio: float samples in [-1, 1] at a fixed sample rate.

    The sample array is made read-only on construction so clips can be
    shared across threads without copying.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValidationError(f"expected mono 1-D samples, got shape {samples.shape}")
        if samples.size and not np.all(np.isfinite(samples)):
            raise ValidationError("samples must be finite")
        if self.sample_rate <= 0:
            raise ValidationError(f"sample_rate must be positive, got {self.sample_rate}")
        samples = samples.copy()
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


def segment(clip: AudioClip, interval_seconds: float = SEGMENT_SECONDS) -> list[AudioClip]:
    """Split a clip into consecutive non-overlapping fixed-length segments.

    Segment length is round(interval_seconds * sample_rate) samples; any
    trailing remainder shorter than one interval is dropped. A clip shorter
    than one interval yields an empty list.
    """
    if len(clip) == 0:
        raise ValidationError("cannot segment an empty clip")
    seg_len = int(round(interval_seconds * clip.sample_rate))
    if seg_len <= 0:
        raise ValidationError(f"interval {interval_seconds}s is below one sample")
    count = len(clip) // seg_len
    return [
        AudioClip(clip.samples[i * seg_len : (i + 1) * seg_len], clip.sample_rate)
        for i in range(count)
    ]


def resample(clip: AudioClip, target_rate: int) -> AudioClip:
    """Linear-interpolation resample. Identity when rates already match."""
    if target_rate <= 0:
        raise ValidationError(f"target_rate must be positive, got {target_rate}")
    if clip.sample_rate == target_rate:
        return clip
    if len(clip) == 0:
        return AudioClip(np.zeros(0), target_rate)
    n_out = int(round(len(clip) * target_rate / clip.sample_rate))
    src_t = np.arange(len(clip)) / clip.sample_rate
    dst_t = np.arange(n_out) / target_rate
    return AudioClip(np.interp(dst_t, src_t, clip.samples), target_rate)


def to_canonical(clip: AudioClip) -> AudioClip:
    """Resample to the canonical 16 kHz rate used throughout the pipeline."""
    return resample(clip, SAMPLE_RATE)
