"""Invertible RGB encoding of mel spectrograms.

Amplitudes map through a clamped natural log onto 24-bit integer codes,
S = floor((ln a - ln amp_floor) * scale), which pack exactly into the
three 8-bit channels: red carries the high byte, green the middle, blue
the low. Decoding is the exact integer inverse followed by
amp_floor * exp(S / scale), so a round trip loses at most one code
quantum (a factor of exp(1/scale)) per cell.

Images travel as 8-bit RGB 128x128 PNGs with a JSON sidecar recording
the scale constants, so decoding never guesses.
"""

from __future__ import annotations

import io
import json
import math
import os
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from voiceage import SAMPLE_RATE
from voiceage.audio.mel import N_FRAMES, N_MELS, MelSpectrogram
from voiceage.errors import DimensionError, FormatError, RangeError, ValidationError

CODE_MAX = 2**24 - 1
SIDECAR_NAME = "scale_config.json"


@dataclass(frozen=True)
class ScaleConfig:
    """Log-amplitude window mapped onto the 24-bit code range."""

    amp_floor: float = 1e-5
    amp_ceil: float = 1e5

    def __post_init__(self) -> None:
        if not (0 < self.amp_floor < self.amp_ceil):
            raise ValidationError(
                f"need 0 < amp_floor < amp_ceil, got {self.amp_floor}, {self.amp_ceil}"
            )

    @property
    def scale(self) -> float:
        return CODE_MAX / (math.log(self.amp_ceil) - math.log(self.amp_floor))


@dataclass(frozen=True)
class RgbSpectrogram:
    """128x128 grid of (r, g, b) byte triples plus its scale config."""

    pixels: np.ndarray
    scale_config: ScaleConfig = ScaleConfig()

    def __post_init__(self) -> None:
        pixels = np.asarray(self.pixels)
        if pixels.shape != (N_MELS, N_FRAMES, 3):
            raise DimensionError(
                f"expected ({N_MELS}, {N_FRAMES}, 3) pixels, got {pixels.shape}"
            )
        if pixels.dtype != np.uint8:
            if np.any(pixels < 0) or np.any(pixels > 255):
                raise RangeError("channel values must be in [0, 255]")
            pixels = pixels.astype(np.uint8)
        pixels = pixels.copy()
        pixels.flags.writeable = False
        object.__setattr__(self, "pixels", pixels)


def codes_from_amplitudes(amplitudes: np.ndarray, cfg: ScaleConfig) -> np.ndarray:
    """Vectorized amplitude -> 24-bit code mapping (clamping absorbs
    out-of-range input, including zero)."""
    a = np.clip(np.asarray(amplitudes, dtype=np.float64), cfg.amp_floor, cfg.amp_ceil)
    # 1e-6 of a code unit absorbs log/multiply rounding, so decoded
    # quantum-boundary amplitudes floor back to their own code exactly
    s = np.floor((np.log(a) - math.log(cfg.amp_floor)) * cfg.scale + 1e-6)
    s = np.clip(s, 0, CODE_MAX).astype(np.int64)
    # the exact ceiling must land on the top code despite float rounding
    return np.where(a >= cfg.amp_ceil, CODE_MAX, s)


def amplitudes_from_codes(codes: np.ndarray, cfg: ScaleConfig) -> np.ndarray:
    return cfg.amp_floor * np.exp(np.asarray(codes, dtype=np.float64) / cfg.scale)


def amplitude_to_code(amplitude: float, cfg: ScaleConfig = ScaleConfig()) -> int:
    if not math.isfinite(amplitude) or amplitude < 0:
        raise RangeError(f"amplitude must be finite and >= 0, got {amplitude}")
    return int(codes_from_amplitudes(np.array(amplitude), cfg))


def encode_pixel(code: int) -> tuple[int, int, int]:
    """24-bit code -> (red, green, blue): high, middle, low byte."""
    if not 0 <= code <= CODE_MAX:
        raise RangeError(f"code must be in [0, {CODE_MAX}], got {code}")
    return code // 256**2, (code % 256**2) // 256, code % 256


def decode_pixel(red: int, green: int, blue: int) -> int:
    for name, value in (("red", red), ("green", green), ("blue", blue)):
        if not 0 <= value <= 255:
            raise RangeError(f"{name} channel must be in [0, 255], got {value}")
    return red * 256**2 + green * 256 + blue


def encode_spectrogram(mel: MelSpectrogram, cfg: ScaleConfig = ScaleConfig()) -> RgbSpectrogram:
    """Per-cell code packing; y axis is frequency, x axis is time."""
    codes = codes_from_amplitudes(mel.values, cfg)
    pixels = np.stack(
        [codes >> 16, (codes >> 8) & 0xFF, codes & 0xFF], axis=-1
    ).astype(np.uint8)
    return RgbSpectrogram(pixels, cfg)


def decode_spectrogram(img: RgbSpectrogram) -> MelSpectrogram:
    codes = spectrogram_codes(img)
    return MelSpectrogram(amplitudes_from_codes(codes, img.scale_config))


def spectrogram_codes(img: RgbSpectrogram) -> np.ndarray:
    p = img.pixels.astype(np.int64)
    return (p[..., 0] << 16) | (p[..., 1] << 8) | p[..., 2]


def save_png(img: RgbSpectrogram) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(img.pixels, mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def load_png(data: bytes, cfg: ScaleConfig = ScaleConfig()) -> RgbSpectrogram:
    try:
        image = Image.open(io.BytesIO(data))
        image.load()
    except (UnidentifiedImageError, OSError) as exc:
        raise FormatError(f"not a readable PNG: {exc}") from exc
    if image.format != "PNG":
        raise FormatError(f"expected PNG, got {image.format}")
    if image.mode != "RGB":
        raise FormatError(f"expected 8-bit RGB without alpha, got mode {image.mode}")
    if image.size != (N_FRAMES, N_MELS):
        raise DimensionError(f"expected {N_MELS}x{N_FRAMES} image, got {image.size}")
    return RgbSpectrogram(np.asarray(image), cfg)


def write_sidecar(directory: str, cfg: ScaleConfig, sample_rate: int = SAMPLE_RATE) -> str:
    """Write the per-directory decode constants next to an image set."""
    path = os.path.join(directory, SIDECAR_NAME)
    record = {
        "amp_floor": cfg.amp_floor,
        "amp_ceil": cfg.amp_ceil,
        "scale": cfg.scale,
        "sample_rate": sample_rate,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def read_sidecar(directory: str) -> tuple[ScaleConfig, int]:
    path = os.path.join(directory, SIDECAR_NAME)
    try:
        with open(path, encoding="utf-8") as fh:
            record = json.load(fh)
        cfg = ScaleConfig(record["amp_floor"], record["amp_ceil"])
        sample_rate = int(record["sample_rate"])
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise FormatError(f"unreadable sidecar at {path}: {exc}") from exc
    return cfg, sample_rate
