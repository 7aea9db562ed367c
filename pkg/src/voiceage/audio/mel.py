"""128-band mel power spectrograms over 0.24 s segments.

The filterbank uses the HTK mel formula on 0-8000 Hz with triangular
filters normalized to unit peak, so each band is a plain weighted sum of
FFT power bins and every filter keeps at least one strictly positive
weight at the default FFT size.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from voiceage import SAMPLE_RATE, SEGMENT_SECONDS
from voiceage.audio.clip import AudioClip
from voiceage.audio.stft import StftConfig, stft
from voiceage.errors import DimensionError, ValidationError

N_MELS = 128
N_FRAMES = 128
F_MIN = 0.0
F_MAX = 8000.0


def hz_to_mel(hz):
    return 2595.0 * np.log10(1.0 + np.asarray(hz, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


@dataclass(frozen=True)
class MelSpectrogram:
    """128 bands x 128 frames of non-negative power values."""

    values: np.ndarray
    sample_rate: int = SAMPLE_RATE

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (N_MELS, N_FRAMES):
            raise DimensionError(
                f"expected ({N_MELS}, {N_FRAMES}) mel values, got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("mel values must be finite")
        if np.any(values < 0):
            raise ValidationError("mel power values must be non-negative")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


@lru_cache(maxsize=4)
def mel_filterbank(
    n_mels: int = N_MELS,
    fft_size: int = StftConfig().fft_size,
    sample_rate: int = SAMPLE_RATE,
    f_min: float = F_MIN,
    f_max: float = F_MAX,
) -> np.ndarray:
    """Triangular mel filterbank, shape [n_mels, fft_size//2 + 1].

    Filter centers are strictly increasing; every filter is rescaled to a
    peak weight of exactly 1.
    """
    n_bins = fft_size // 2 + 1
    bin_hz = np.arange(n_bins) * sample_rate / fft_size
    edges = mel_to_hz(np.linspace(hz_to_mel(f_min), hz_to_mel(f_max), n_mels + 2))

    fb = np.zeros((n_mels, n_bins))
    for m in range(n_mels):
        left, center, right = edges[m], edges[m + 1], edges[m + 2]
        up = (bin_hz - left) / (center - left)
        down = (right - bin_hz) / (right - center)
        fb[m] = np.maximum(0.0, np.minimum(up, down))

    peaks = fb.max(axis=1)
    if np.any(peaks <= 0):
        raise ValidationError(
            f"filterbank has empty filters at fft_size={fft_size}; increase the FFT size"
        )
    fb /= peaks[:, None]
    fb.flags.writeable = False
    return fb


def mel_spectrogram(clip: AudioClip, config: StftConfig = StftConfig()) -> MelSpectrogram:
    """Mel power spectrogram of exactly one 0.24 s segment.

    Power STFT times the filterbank, cropped (or zero-padded) on the time
    axis to exactly 128 frames.
    """
    expected = int(round(SEGMENT_SECONDS * clip.sample_rate))
    if len(clip) != expected:
        raise DimensionError(
            f"expected one {SEGMENT_SECONDS}s segment ({expected} samples), got {len(clip)}"
        )
    spec = stft(clip, config)
    power = np.abs(spec.bins) ** 2
    fb = mel_filterbank(N_MELS, config.fft_size, clip.sample_rate)
    mel = fb @ power
    if mel.shape[1] >= N_FRAMES:
        mel = mel[:, :N_FRAMES]
    else:
        mel = np.pad(mel, ((0, 0), (0, N_FRAMES - mel.shape[1])))
    return MelSpectrogram(mel, clip.sample_rate)
