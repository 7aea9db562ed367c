"""Short-time Fourier transform and its weighted overlap-add inverse.

Defaults are chosen so one 0.24 s segment at 16 kHz (3840 samples) comes
out as exactly 128 center-aligned frames after cropping: with hop 30,
center padding yields 129 frames and the last one is dropped downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from voiceage.audio.clip import AudioClip
from voiceage.errors import ValidationError

DEFAULT_FFT_SIZE = 1024
DEFAULT_HOP = 30


@dataclass(frozen=True)
class StftConfig:
    fft_size: int = DEFAULT_FFT_SIZE
    hop: int = DEFAULT_HOP
    window: str = "hann"
    center_pad: bool = True

    def __post_init__(self) -> None:
        if self.fft_size <= 0 or self.fft_size & (self.fft_size - 1):
            raise ValidationError(f"fft_size must be a power of two, got {self.fft_size}")
        if not 0 < self.hop <= self.fft_size:
            raise ValidationError(f"hop must be in (0, fft_size], got {self.hop}")
        if self.window not in ("hann", "rect"):
            raise ValidationError(f"unknown window {self.window!r}")

    @property
    def n_bins(self) -> int:
        return self.fft_size // 2 + 1


@dataclass(frozen=True)
class ComplexSpectrogram:
    """(fft_size/2 + 1) x frames complex STFT values plus their config."""

    bins: np.ndarray
    config: StftConfig

    def __post_init__(self) -> None:
        bins = np.asarray(self.bins, dtype=np.complex128)
        if bins.ndim != 2 or bins.shape[0] != self.config.n_bins:
            raise ValidationError(
                f"expected ({self.config.n_bins}, frames) bins, got shape {bins.shape}"
            )
        if bins.shape[1] < 1:
            raise ValidationError("spectrogram needs at least one frame")
        if not np.all(np.isfinite(bins)):
            raise ValidationError("spectrogram bins must be finite")
        bins.flags.writeable = False
        object.__setattr__(self, "bins", bins)

    @property
    def n_frames(self) -> int:
        return self.bins.shape[1]

    def magnitude(self) -> np.ndarray:
        return np.abs(self.bins)


@lru_cache(maxsize=8)
def window_array(window: str, fft_size: int) -> np.ndarray:
    if window == "hann":
        # periodic Hann: exact overlap-add behaviour for WOLA resynthesis
        n = np.arange(fft_size)
        w = 0.5 - 0.5 * np.cos(2.0 * np.pi * n / fft_size)
    else:
        w = np.ones(fft_size)
    w.flags.writeable = False
    return w


def _frame_signal(samples: np.ndarray, config: StftConfig) -> np.ndarray:
    if config.center_pad:
        pad = config.fft_size // 2
        samples = np.pad(samples, (pad, pad))
    if len(samples) < config.fft_size:
        samples = np.pad(samples, (0, config.fft_size - len(samples)))
    n_frames = 1 + (len(samples) - config.fft_size) // config.hop
    idx = np.arange(config.fft_size)[None, :] + config.hop * np.arange(n_frames)[:, None]
    return samples[idx]


def stft(clip: AudioClip, config: StftConfig = StftConfig()) -> ComplexSpectrogram:
    """Windowed DFT of hop-aligned frames; frame t is centered at t*hop
    when center_pad is on."""
    if len(clip) < 1:
        raise ValidationError("cannot transform an empty clip")
    frames = _frame_signal(clip.samples, config) * window_array(config.window, config.fft_size)
    bins = np.fft.rfft(frames, axis=1).T
    return ComplexSpectrogram(bins, config)


def istft(spec_bins: np.ndarray, config: StftConfig, length: int) -> np.ndarray:
    """Weighted overlap-add inverse, normalized by the summed squared
    window, cropped to `length` samples."""
    bins = np.asarray(spec_bins)
    n_frames = bins.shape[1]
    frames = np.fft.irfft(bins.T, n=config.fft_size, axis=1)
    w = window_array(config.window, config.fft_size)
    frames = frames * w

    total = config.fft_size + config.hop * (n_frames - 1)
    out = np.zeros(total)
    norm = np.zeros(total)
    wsq = w * w
    for t in range(n_frames):
        start = t * config.hop
        out[start : start + config.fft_size] += frames[t]
        norm[start : start + config.fft_size] += wsq
    out /= np.maximum(norm, 1e-12)

    start = config.fft_size // 2 if config.center_pad else 0
    out = out[start : start + length]
    if len(out) < length:
        out = np.pad(out, (0, length - len(out)))
    return out
