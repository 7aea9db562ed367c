"""Manifest entries to training arrays.

Each audio path must hold one pre-cut segment; its mel spectrogram
becomes a 1x128x128 log-scaled input. Face crops, when present,
load as 3x128x128 images in [0, 1]. Ages translate to class labels
under the chosen scheme; excluded ages drop out of the dataset.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from voiceage.audio.clip import AudioClip
from voiceage.audio.mel import N_FRAMES, N_MELS, mel_spectrogram
from voiceage.audio.stft import StftConfig
from voiceage.audio.wav import load_wav
from voiceage.codec import ScaleConfig
from voiceage.data.manifest import ManifestEntry
from voiceage.errors import FormatError, ValidationError
from voiceage.models.bins import AgeBinScheme, age_to_bin
from voiceage.models.training import LabeledDataset
from voiceage.models.vann import mel_to_input


def load_face_crop(source) -> np.ndarray:
    """(3, 128, 128) float32 in [0, 1], resizing when needed.

    Accepts a path or any binary file object PIL can open.
    """
    try:
        image = Image.open(source)
        image.load()
    except (UnidentifiedImageError, OSError) as exc:
        raise FormatError(f"unreadable image at {source}: {exc}") from exc
    image = image.convert("RGB")
    if image.size != (N_FRAMES, N_MELS):
        image = image.resize((N_FRAMES, N_MELS), Image.BILINEAR)
    pixels = np.asarray(image, dtype=np.float32) / 255.0
    return pixels.transpose(2, 0, 1)


def segment_input(
    clip: AudioClip,
    stft_config: StftConfig = StftConfig(),
    scale_config: ScaleConfig = ScaleConfig(),
) -> np.ndarray:
    return mel_to_input(mel_spectrogram(clip, stft_config), scale_config)


def dataset_from_manifest(
    entries: list[ManifestEntry],
    scheme: AgeBinScheme,
    split: str | None = None,
    with_visual: bool = False,
    stft_config: StftConfig = StftConfig(),
    scale_config: ScaleConfig = ScaleConfig(),
    root: str | Path | None = None,
) -> LabeledDataset:
    """Load every usable entry of one split into arrays.

    Entries whose age the scheme excludes are skipped; with_visual
    requires a face crop on every remaining entry.
    """
    base = Path(root) if root is not None else None

    def resolve(path: str) -> Path:
        p = Path(path)
        return base / p if base is not None and not p.is_absolute() else p

    inputs: list[np.ndarray] = []
    labels: list[int] = []
    visuals: list[np.ndarray] = []
    for entry in entries:
        if split is not None and entry.split != split:
            continue
        label = age_to_bin(entry.age, scheme)
        if label is None:
            continue
        clip = load_wav(resolve(entry.audio_segment_path).read_bytes())
        inputs.append(segment_input(clip, stft_config, scale_config))
        labels.append(label)
        if with_visual:
            if entry.face_crop_path is None:
                raise ValidationError(
                    f"entry {entry.audio_segment_path} has no face crop for a fused model"
                )
            visuals.append(load_face_crop(resolve(entry.face_crop_path)))
    if not inputs:
        raise ValidationError(
            f"no usable entries for scheme {scheme.name}"
            + (f" in split {split!r}" if split else "")
        )
    return LabeledDataset(
        inputs=np.stack(inputs),
        labels=np.array(labels, dtype=np.int64),
        visual=np.stack(visuals) if with_visual else None,
    )
