"""Age classifier networks.

Every variant shares one trunk shape: a single strided convolution,
feature normalization, leaky ReLU, then a dense projection with the
same normalization and activation. The audio trunk reads a 1x128x128
log-scaled mel grid, the visual trunk a 3x128x128 image. Fusion
variants run both trunks and merge the penultimate feature vectors,
either by concatenation or by factorized bilinear pooling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from voiceage import nn
from voiceage.codec import RgbSpectrogram, ScaleConfig
from voiceage.audio.mel import MelSpectrogram
from voiceage.errors import DimensionError, ValidationError
from voiceage.nn import ops

MODALITIES = ("audio", "visual", "av-cat", "av-mfb")


@dataclass(frozen=True)
class VannConfig:
    modality: str = "audio"
    class_count: int = 2
    conv_filters: int = 16
    conv_size: int = 5
    conv_stride: int = 2
    dense_width: int = 128
    input_size: int = 128
    mfb_factors: int = 4
    mfb_output: int = 128
    epochs: int = 40
    batch_size: int = 32
    learning_rate: float = 1e-3

    def __post_init__(self) -> None:
        if self.modality not in MODALITIES:
            raise ValidationError(f"modality must be one of {MODALITIES}, got {self.modality!r}")
        for field in ("class_count", "conv_filters", "conv_size", "conv_stride",
                      "dense_width", "input_size", "mfb_factors", "mfb_output",
                      "epochs", "batch_size"):
            if getattr(self, field) < 1:
                raise ValidationError(f"{field} must be >= 1")

    @property
    def conv_output_size(self) -> int:
        pad = self.conv_size // 2
        return (self.input_size + 2 * pad - self.conv_size) // self.conv_stride + 1


class VannTrunk(nn.Module):
    """conv -> norm -> leaky_relu -> flatten -> dense -> norm -> leaky_relu."""

    def __init__(self, in_channels: int, config: VannConfig, seed: int, label: str):
        self.conv = nn.Conv2d(
            in_channels,
            config.conv_filters,
            config.conv_size,
            seed,
            f"{label}.conv",
            stride=config.conv_stride,
            padding=config.conv_size // 2,
        )
        self.conv_norm = nn.BatchNorm(config.conv_filters)
        flat = config.conv_filters * config.conv_output_size**2
        self.dense = nn.Dense(flat, config.dense_width, seed, f"{label}.dense")
        self.dense_norm = nn.BatchNorm(config.dense_width)

    def __call__(self, x: nn.Tensor, training: bool) -> nn.Tensor:
        h = ops.leaky_relu(self.conv_norm(self.conv(x), training))
        h = h.reshape((h.shape[0], -1))
        return ops.leaky_relu(self.dense_norm(self.dense(h), training))


class VannA(nn.Module):
    """Audio-only classifier over 1x128x128 log-mel inputs."""

    def __init__(self, config: VannConfig, seed: int = 0):
        self.config = config
        self.trunk = VannTrunk(1, config, seed, "audio")
        self.head = nn.Dense(config.dense_width, config.class_count, seed, "audio.head")

    def features(self, x: nn.Tensor, training: bool = False) -> nn.Tensor:
        return self.trunk(x, training)

    def __call__(self, x: nn.Tensor, training: bool = False) -> nn.Tensor:
        return self.head(self.features(x, training))


class VannV(nn.Module):
    """Visual classifier over 3x128x128 image inputs."""

    def __init__(self, config: VannConfig, seed: int = 0):
        self.config = config
        self.trunk = VannTrunk(3, config, seed, "visual")
        self.head = nn.Dense(config.dense_width, config.class_count, seed, "visual.head")

    def features(self, x: nn.Tensor, training: bool = False) -> nn.Tensor:
        return self.trunk(x, training)

    def __call__(self, x: nn.Tensor, training: bool = False) -> nn.Tensor:
        return self.head(self.features(x, training))


class CatFusion(nn.Module):
    """Concatenate both feature vectors, then dense + norm + leaky_relu."""

    def __init__(self, audio_dim: int, visual_dim: int, out_dim: int, seed: int):
        self.dense = nn.Dense(audio_dim + visual_dim, out_dim, seed, "fuse.cat")
        self.norm = nn.BatchNorm(out_dim)

    def __call__(self, audio: nn.Tensor, visual: nn.Tensor, training: bool) -> nn.Tensor:
        if audio.shape[0] != visual.shape[0]:
            raise DimensionError(
                f"batch sizes differ: audio {audio.shape[0]}, visual {visual.shape[0]}"
            )
        fused = ops.concat([audio, visual], axis=1)
        return ops.leaky_relu(self.norm(self.dense(fused), training))


class MfbFusion(nn.Module):
    """Factorized bilinear pooling of two feature vectors.

    Each modality is projected (bias-free) to factors*out_dim values;
    the elementwise product is sum-pooled over the factor axis, then
    passed through signed square root and L2 normalization. An all-zero
    input on either side zeroes the product, hence the fused output.
    """

    def __init__(self, audio_dim: int, visual_dim: int, factors: int, out_dim: int, seed: int):
        if factors < 1:
            raise ValidationError(f"factors must be >= 1, got {factors}")
        self.factors = factors
        self.out_dim = out_dim
        self.audio_proj = nn.Dense(audio_dim, factors * out_dim, seed, "fuse.mfb.audio", bias=False)
        self.visual_proj = nn.Dense(
            visual_dim, factors * out_dim, seed, "fuse.mfb.visual", bias=False
        )

    def __call__(self, audio: nn.Tensor, visual: nn.Tensor, training: bool = False) -> nn.Tensor:
        if audio.shape[0] != visual.shape[0]:
            raise DimensionError(
                f"batch sizes differ: audio {audio.shape[0]}, visual {visual.shape[0]}"
            )
        product = self.audio_proj(audio) * self.visual_proj(visual)
        pooled = product.reshape((product.shape[0], self.out_dim, self.factors)).sum(axis=2)
        return ops.l2_normalize(ops.signed_sqrt(pooled), axis=1)


class VannAvCat(nn.Module):
    """Audio + visual trunks fused by concatenation."""

    def __init__(self, config: VannConfig, seed: int = 0):
        self.config = config
        self.audio_trunk = VannTrunk(1, config, seed, "audio")
        self.visual_trunk = VannTrunk(3, config, seed, "visual")
        self.fusion = CatFusion(config.dense_width, config.dense_width, config.dense_width, seed)
        self.head = nn.Dense(config.dense_width, config.class_count, seed, "cat.head")

    def __call__(self, audio: nn.Tensor, visual: nn.Tensor, training: bool = False) -> nn.Tensor:
        a = self.audio_trunk(audio, training)
        v = self.visual_trunk(visual, training)
        return self.head(self.fusion(a, v, training))


class VannAvMfb(nn.Module):
    """Audio + visual trunks fused by factorized bilinear pooling."""

    def __init__(self, config: VannConfig, seed: int = 0):
        self.config = config
        self.audio_trunk = VannTrunk(1, config, seed, "audio")
        self.visual_trunk = VannTrunk(3, config, seed, "visual")
        self.fusion = MfbFusion(
            config.dense_width,
            config.dense_width,
            config.mfb_factors,
            config.mfb_output,
            seed,
        )
        self.head = nn.Dense(config.mfb_output, config.class_count, seed, "mfb.head")

    def __call__(self, audio: nn.Tensor, visual: nn.Tensor, training: bool = False) -> nn.Tensor:
        a = self.audio_trunk(audio, training)
        v = self.visual_trunk(visual, training)
        return self.head(self.fusion(a, v, training))


def build_model(config: VannConfig, seed: int = 0) -> nn.Module:
    builders = {
        "audio": VannA,
        "visual": VannV,
        "av-cat": VannAvCat,
        "av-mfb": VannAvMfb,
    }
    return builders[config.modality](config, seed)


def mel_to_input(mel: MelSpectrogram, cfg: ScaleConfig = ScaleConfig()) -> np.ndarray:
    """Log-scale mel values into [0, 1] over the codec's amplitude window."""
    span = math.log(cfg.amp_ceil) - math.log(cfg.amp_floor)
    clipped = np.clip(mel.values, cfg.amp_floor, cfg.amp_ceil)
    scaled = (np.log(clipped) - math.log(cfg.amp_floor)) / span
    return scaled[np.newaxis, :, :].astype(np.float32)


def rgb_to_input(img: RgbSpectrogram) -> np.ndarray:
    """Channels-first [0, 1] float image from byte pixels."""
    return (img.pixels.astype(np.float32) / 255.0).transpose(2, 0, 1)
