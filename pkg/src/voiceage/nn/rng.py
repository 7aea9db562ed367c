"""Deterministic random streams and weight initialization.

Streams come from the counter-based Philox generator keyed by a user
seed plus hashed string labels, so any (seed, label...) pair yields the
same values on every platform and the streams are independent.
"""

from __future__ import annotations

import hashlib

import numpy as np

from voiceage.errors import ValidationError

SCHEMES = ("uniform-fan-in", "normal")


def _label_words(label) -> list[int]:
    digest = hashlib.sha256(str(label).encode("utf-8")).digest()
    return [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 16, 4)]


def derive_rng(seed: int, *labels) -> np.random.Generator:
    entropy = [seed & 0xFFFFFFFF, (seed >> 32) & 0xFFFFFFFF]
    for label in labels:
        entropy.extend(_label_words(label))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def default_fan_in(shape: tuple[int, ...]) -> int:
    """Fan-in convention: dense weights are [in, out]; conv kernels are
    [out, in, kh, kw]."""
    if len(shape) == 2:
        return shape[0]
    if len(shape) > 2:
        return int(np.prod(shape[1:]))
    return shape[0] if shape else 1


def init_array(
    rng: np.random.Generator,
    shape: tuple[int, ...],
    scheme: str = "uniform-fan-in",
    sigma: float = 0.02,
    fan_in: int | None = None,
    dtype=np.float32,
) -> np.ndarray:
    if scheme == "uniform-fan-in":
        bound = np.sqrt(6.0 / (fan_in if fan_in is not None else default_fan_in(shape)))
        values = rng.uniform(-bound, bound, size=shape)
    elif scheme == "normal":
        values = rng.normal(0.0, sigma, size=shape)
    else:
        raise ValidationError(f"unknown init scheme {scheme!r}; choose from {SCHEMES}")
    return values.astype(dtype)


def seeded_init(
    shape: tuple[int, ...],
    scheme: str = "uniform-fan-in",
    seed: int = 0,
    sigma: float = 0.02,
    fan_in: int | None = None,
    dtype=np.float32,
) -> np.ndarray:
    """Deterministic initial weights for a given (shape, scheme, seed)."""
    return init_array(derive_rng(seed, "init", scheme, shape), shape, scheme, sigma, fan_in, dtype)
