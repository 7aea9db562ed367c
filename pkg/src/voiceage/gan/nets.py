"""Generator and patch discriminator networks.

The generator is an encoder-residual-decoder: two stride-2
downsampling convolutions, a residual stack, two nearest-neighbor
upsampling convolutions, and a tanh head, all with per-sample
instance normalization. The discriminator scores overlapping patches
rather than whole images; on 128x128 inputs the default topology
emits a 14x14 realness grid.
"""

from __future__ import annotations

from voiceage import nn
from voiceage.errors import DimensionError
from voiceage.nn import ops


class ResidualBlock(nn.Module):
    def __init__(self, channels: int, seed: int, label: str):
        self.conv1 = nn.Conv2d(
            channels, channels, 3, seed, f"{label}.conv1", padding=1, scheme="normal"
        )
        self.norm1 = nn.InstanceNorm(channels)
        self.conv2 = nn.Conv2d(
            channels, channels, 3, seed, f"{label}.conv2", padding=1, scheme="normal"
        )
        self.norm2 = nn.InstanceNorm(channels)

    def __call__(self, x: nn.Tensor) -> nn.Tensor:
        h = ops.relu(self.norm1(self.conv1(x)))
        return x + self.norm2(self.conv2(h))


class Generator(nn.Module):
    """3-channel image in [-1, 1] -> same-shape image in [-1, 1]."""

    def __init__(self, filters: int, residual_blocks: int, seed: int, label: str):
        self.down1 = nn.Conv2d(
            3, filters, 4, seed, f"{label}.down1", stride=2, padding=1, scheme="normal"
        )
        self.norm1 = nn.InstanceNorm(filters)
        self.down2 = nn.Conv2d(
            filters, 2 * filters, 4, seed, f"{label}.down2", stride=2, padding=1, scheme="normal"
        )
        self.norm2 = nn.InstanceNorm(2 * filters)
        self.blocks = [
            ResidualBlock(2 * filters, seed, f"{label}.res{i}") for i in range(residual_blocks)
        ]
        self.up1 = nn.Conv2d(2 * filters, filters, 3, seed, f"{label}.up1", padding=1, scheme="normal")
        self.norm3 = nn.InstanceNorm(filters)
        self.up2 = nn.Conv2d(filters, filters, 3, seed, f"{label}.up2", padding=1, scheme="normal")
        self.norm4 = nn.InstanceNorm(filters)
        self.head = nn.Conv2d(filters, 3, 7, seed, f"{label}.head", padding=3, scheme="normal")

    def __call__(self, x: nn.Tensor) -> nn.Tensor:
        if x.ndim != 4 or x.shape[1] != 3:
            raise DimensionError(f"expected (N, 3, H, W) input, got {x.shape}")
        if x.shape[2] % 4 or x.shape[3] % 4:
            raise DimensionError(f"spatial dims must be divisible by 4, got {x.shape}")
        h = ops.relu(self.norm1(self.down1(x)))
        h = ops.relu(self.norm2(self.down2(h)))
        for block in self.blocks:
            h = block(h)
        h = ops.relu(self.norm3(self.up1(ops.upsample_nearest2x(h))))
        h = ops.relu(self.norm4(self.up2(ops.upsample_nearest2x(h))))
        return ops.tanh(self.head(h))


class Discriminator(nn.Module):
    """Patch realness scores; no activation on the output grid."""

    def __init__(self, filters: int, seed: int, label: str):
        self.conv1 = nn.Conv2d(3, filters, 4, seed, f"{label}.conv1", stride=2, padding=1, scheme="normal")
        self.conv2 = nn.Conv2d(
            filters, 2 * filters, 4, seed, f"{label}.conv2", stride=2, padding=1, scheme="normal"
        )
        self.norm2 = nn.InstanceNorm(2 * filters)
        self.conv3 = nn.Conv2d(
            2 * filters, 4 * filters, 4, seed, f"{label}.conv3", stride=2, padding=1, scheme="normal"
        )
        self.norm3 = nn.InstanceNorm(4 * filters)
        self.conv4 = nn.Conv2d(
            4 * filters, 8 * filters, 4, seed, f"{label}.conv4", padding=1, scheme="normal"
        )
        self.norm4 = nn.InstanceNorm(8 * filters)
        self.head = nn.Conv2d(8 * filters, 1, 4, seed, f"{label}.head", padding=1, scheme="normal")

    def __call__(self, x: nn.Tensor) -> nn.Tensor:
        if x.ndim != 4 or x.shape[1] != 3:
            raise DimensionError(f"expected (N, 3, H, W) input, got {x.shape}")
        h = ops.leaky_relu(self.conv1(x))
        h = ops.leaky_relu(self.norm2(self.conv2(h)))
        h = ops.leaky_relu(self.norm3(self.conv3(h)))
        h = ops.leaky_relu(self.norm4(self.conv4(h)))
        return self.head(h)
