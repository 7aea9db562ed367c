"""Shared synthetic-data builders for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from voiceage import SEGMENT_SAMPLES
from voiceage.audio.clip import AudioClip
from voiceage.models.training import LabeledDataset


def tone_clip(frequency: float, seconds: float = 0.24, amplitude: float = 0.5) -> AudioClip:
    t = np.arange(int(round(seconds * 16000))) / 16000.0
    return AudioClip(samples=amplitude * np.sin(2 * np.pi * frequency * t), sample_rate=16000)


def noise_clip(seconds: float, seed: int = 0, amplitude: float = 0.1) -> AudioClip:
    rng = np.random.default_rng(seed)
    n = int(round(seconds * 16000))
    return AudioClip(samples=amplitude * rng.standard_normal(n), sample_rate=16000)


def band_image(center: int, seed: int, width: int = 8, level: float = 0.8) -> np.ndarray:
    """1x128x128 input with energy concentrated around one mel band."""
    rng = np.random.default_rng(seed)
    rows = np.arange(128, dtype=np.float64)
    profile = level * np.exp(-0.5 * ((rows - center) / width) ** 2)
    grid = profile[:, None] * (0.9 + 0.2 * rng.random((1, 128)))
    grid += 0.02 * rng.random((128, 128))
    return grid[np.newaxis].astype(np.float32)


def band_task_dataset(
    n: int, seed: int, low_center: int = 30, high_center: int = 96
) -> LabeledDataset:
    """Binary task: energy band low on the mel axis vs high."""
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, 2, size=n)
    inputs = np.stack(
        [
            band_image(low_center if y == 0 else high_center, seed=int(rng.integers(1 << 31)))
            for y in labels
        ]
    )
    return LabeledDataset(inputs=inputs, labels=labels)


@pytest.fixture
def one_segment_noise() -> AudioClip:
    rng = np.random.default_rng(7)
    return AudioClip(samples=0.1 * rng.standard_normal(SEGMENT_SAMPLES), sample_rate=16000)
