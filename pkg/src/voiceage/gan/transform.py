"""End-to-end audio aging.

A clip is segmented, each segment rendered to a coded RGB
spectrogram, pushed through one generator, decoded back to mel
amplitudes, and resynthesized with iterative phase estimation. The
per-segment waveforms concatenate in order, so output duration is
the number of whole segments times the segment length.
"""

from __future__ import annotations

import numpy as np

from voiceage import codec, nn
from voiceage.audio.clip import AudioClip, segment, to_canonical
from voiceage.audio.griffin_lim import griffin_lim
from voiceage.audio.mel import MelSpectrogram, mel_spectrogram
from voiceage.audio.stft import StftConfig
from voiceage.errors import ValidationError

DIRECTIONS = ("older", "younger")


def normalize_image(pixels: np.ndarray) -> np.ndarray:
    """(H, W, 3) bytes -> (3, H, W) float32 in [-1, 1]."""
    scaled = pixels.astype(np.float32) / 127.5 - 1.0
    return scaled.transpose(2, 0, 1)


def denormalize_image(channels: np.ndarray) -> np.ndarray:
    """(3, H, W) float in [-1, 1] -> (H, W, 3) bytes."""
    pixels = np.clip((channels + 1.0) * 127.5, 0.0, 255.0)
    return np.round(pixels).astype(np.uint8).transpose(1, 2, 0)


def transform_spectrogram(
    generator, img: codec.RgbSpectrogram
) -> codec.RgbSpectrogram:
    """One coded spectrogram through one generator."""
    batch = normalize_image(img.pixels)[np.newaxis]
    with nn.no_grad():
        out = generator(nn.Tensor(batch))
    return codec.RgbSpectrogram(denormalize_image(out.data[0]), img.scale_config)


def transform_audio(
    model,
    clip: AudioClip,
    direction: str,
    scale_config: codec.ScaleConfig = codec.ScaleConfig(),
    stft_config: StftConfig = StftConfig(),
    griffin_lim_iterations: int = 32,
) -> AudioClip:
    """Whole-clip aging in either direction.

    Output duration is deterministic: floor(N / segment) segments,
    each resynthesized at the canonical rate.
    """
    if direction not in DIRECTIONS:
        raise ValidationError(f"direction must be one of {DIRECTIONS}, got {direction!r}")
    clip = to_canonical(clip)
    segments = segment(clip)
    if not segments:
        raise ValidationError(
            f"clip too short to transform: {clip.duration:.3f}s is less than one segment"
        )
    generator = model.g if direction == "older" else model.f

    batch = np.stack(
        [
            normalize_image(codec.encode_spectrogram(mel_spectrogram(s, stft_config), scale_config).pixels)
            for s in segments
        ]
    )
    with nn.no_grad():
        generated = generator(nn.Tensor(batch)).data

    pieces = []
    for channels in generated:
        img = codec.RgbSpectrogram(denormalize_image(channels), scale_config)
        mel = codec.decode_spectrogram(img)
        piece = griffin_lim(mel, iterations=griffin_lim_iterations, config=stft_config)
        pieces.append(piece.samples)
    return AudioClip(samples=np.concatenate(pieces), sample_rate=clip.sample_rate)
