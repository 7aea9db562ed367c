"""Differentiable operators used by the classifiers and the GAN.

Convolution is cross-correlation in NCHW layout, run as a single matrix
product over an im2col matrix; its input gradient is accumulated per
kernel offset over strided slices, which keeps everything vectorized
without a scatter.
"""

from __future__ import annotations

import numpy as np

from voiceage.errors import DimensionError
from voiceage.nn.tensor import Tensor

_LOG_FLOOR = 1e-30


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0
    return Tensor._result(x.data * mask, (x,), lambda g: (g * mask,))


def leaky_relu(x: Tensor, alpha: float = 0.2) -> Tensor:
    slope = np.where(x.data > 0, 1.0, alpha).astype(x.data.dtype)
    return Tensor._result(x.data * slope, (x,), lambda g: (g * slope,))


def tanh(x: Tensor) -> Tensor:
    out = np.tanh(x.data)
    return Tensor._result(out, (x,), lambda g: (g * (1.0 - out * out),))


def sigmoid(x: Tensor) -> Tensor:
    out = np.where(
        x.data >= 0,
        1.0 / (1.0 + np.exp(-np.abs(x.data))),
        np.exp(-np.abs(x.data)) / (1.0 + np.exp(-np.abs(x.data))),
    )
    return Tensor._result(out, (x,), lambda g: (g * out * (1.0 - out),))


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    z = x.data - x.data.max(axis=axis, keepdims=True)
    e = np.exp(z)
    out = e / e.sum(axis=axis, keepdims=True)

    def vjp(g):
        inner = (g * out).sum(axis=axis, keepdims=True)
        return (out * (g - inner),)

    return Tensor._result(out, (x,), vjp)


def signed_sqrt(x: Tensor, eps: float = 1e-12) -> Tensor:
    """sign(x) * sqrt(|x|); the eps keeps the slope finite at zero."""
    root = np.sqrt(np.abs(x.data) + eps)
    out = np.sign(x.data) * root
    return Tensor._result(out, (x,), lambda g: (g * 0.5 / root,))


def concat(tensors: list[Tensor], axis: int = -1) -> Tensor:
    datas = [t.data for t in tensors]
    sizes = [d.shape[axis] for d in datas]
    splits = np.cumsum(sizes)[:-1]

    def vjp(g):
        return tuple(np.split(g, splits, axis=axis))

    return Tensor._result(np.concatenate(datas, axis=axis), tuple(tensors), vjp)


def dense(x: Tensor, weights: Tensor, bias: Tensor | None = None) -> Tensor:
    """Affine map [N, D] x [D, K] (+ [K]) -> [N, K]."""
    if x.ndim != 2 or weights.ndim != 2 or x.shape[1] != weights.shape[0]:
        raise DimensionError(
            f"dense shapes incompatible: {x.shape} x {weights.shape}"
        )
    out = x @ weights
    if bias is not None:
        if bias.shape != (weights.shape[1],):
            raise DimensionError(f"bias shape {bias.shape} != ({weights.shape[1]},)")
        out = out + bias
    return out


def conv2d(
    x: Tensor,
    kernel: Tensor,
    bias: Tensor | None = None,
    stride: int = 1,
    padding: int = 0,
) -> Tensor:
    """Cross-correlation of [N,C,H,W] with [F,C,kH,kW] kernels."""
    xd, kd = x.data, kernel.data
    if xd.ndim != 4 or kd.ndim != 4:
        raise DimensionError(f"conv2d needs 4-D input and kernel, got {xd.shape}, {kd.shape}")
    n, c, h, w = xd.shape
    f, ck, kh, kw = kd.shape
    if c != ck:
        raise DimensionError(f"input has {c} channels but kernel expects {ck}")
    s, p = stride, padding
    ho = (h + 2 * p - kh) // s + 1
    wo = (w + 2 * p - kw) // s + 1
    if ho <= 0 or wo <= 0:
        raise DimensionError(f"kernel {kh}x{kw} does not fit input {h}x{w} with padding {p}")

    xp = np.pad(xd, ((0, 0), (0, 0), (p, p), (p, p))) if p else xd
    windows = np.lib.stride_tricks.sliding_window_view(xp, (kh, kw), axis=(2, 3))
    windows = windows[:, :, ::s, ::s][:, :, :ho, :wo]  # [N,C,Ho,Wo,kh,kw]
    cols = windows.transpose(0, 2, 3, 1, 4, 5).reshape(n * ho * wo, c * kh * kw)
    out = (cols @ kd.reshape(f, -1).T).reshape(n, ho, wo, f).transpose(0, 3, 1, 2)

    def vjp(g):
        g_mat = g.transpose(0, 2, 3, 1).reshape(n * ho * wo, f)
        dk = (g_mat.T @ cols).reshape(f, c, kh, kw)
        dxp = np.zeros_like(xp)
        g_nhwf = g.transpose(0, 2, 3, 1)
        for i in range(kh):
            for j in range(kw):
                contrib = g_nhwf @ kd[:, :, i, j]  # [N,Ho,Wo,C]
                dxp[:, :, i : i + s * ho : s, j : j + s * wo : s] += contrib.transpose(
                    0, 3, 1, 2
                )
        dx = dxp[:, :, p : p + h, p : p + w] if p else dxp
        return dx, dk

    parents = (x, kernel)
    result = Tensor._result(np.ascontiguousarray(out), parents, vjp)
    if bias is not None:
        if bias.shape != (f,):
            raise DimensionError(f"bias shape {bias.shape} != ({f},)")
        result = result + bias.reshape(1, f, 1, 1)
    return result


def upsample_nearest2x(x: Tensor) -> Tensor:
    """Nearest-neighbor x2 upsampling of [N,C,H,W]."""
    n, c, h, w = x.data.shape
    out = np.repeat(np.repeat(x.data, 2, axis=2), 2, axis=3)

    def vjp(g):
        return (g.reshape(n, c, h, 2, w, 2).sum(axis=(3, 5)),)

    return Tensor._result(out, (x,), vjp)


def _standardize(x: Tensor, axes: tuple[int, ...], eps: float) -> tuple[Tensor, np.ndarray, np.ndarray]:
    """Zero-mean unit-variance over `axes` (variance floored by eps)."""
    mu = x.mean(axis=axes, keepdims=True)
    centered = x - mu
    var = (centered * centered).mean(axis=axes, keepdims=True)
    normalized = centered / (var + eps).sqrt()
    return normalized, mu.data, var.data


def feature_norm(
    x: Tensor,
    gain: Tensor,
    shift: Tensor,
    training: bool = True,
    running_mean: np.ndarray | None = None,
    running_var: np.ndarray | None = None,
    momentum: float = 0.1,
    eps: float = 1e-5,
) -> Tensor:
    """Per-feature batch standardization with an affine gain/shift.

    2-D input is normalized per feature over the batch; 4-D input per
    channel over batch and spatial axes. In training mode, batch moments
    are used and `running_mean`/`running_var` (when given) are updated
    in place; in inference mode the running moments are used.
    """
    if x.ndim == 2:
        axes: tuple[int, ...] = (0,)
        param_shape = (1, x.shape[1])
    elif x.ndim == 4:
        axes = (0, 2, 3)
        param_shape = (1, x.shape[1], 1, 1)
    else:
        raise DimensionError(f"feature_norm expects 2-D or 4-D input, got {x.shape}")

    gain_b = gain.reshape(param_shape)
    shift_b = shift.reshape(param_shape)

    if training or running_mean is None or running_var is None:
        normalized, mu, var = _standardize(x, axes, eps)
        if training and running_mean is not None and running_var is not None:
            running_mean *= 1.0 - momentum
            running_mean += momentum * mu.reshape(running_mean.shape)
            running_var *= 1.0 - momentum
            running_var += momentum * var.reshape(running_var.shape)
    else:
        mu = running_mean.reshape(param_shape)
        var = running_var.reshape(param_shape)
        normalized = (x - mu) / np.sqrt(var + eps)
    return normalized * gain_b + shift_b


def instance_norm(x: Tensor, gain: Tensor, shift: Tensor, eps: float = 1e-5) -> Tensor:
    """Per-sample per-channel standardization of [N,C,H,W] with affine."""
    if x.ndim != 4:
        raise DimensionError(f"instance_norm expects 4-D input, got {x.shape}")
    param_shape = (1, x.shape[1], 1, 1)
    normalized, _, _ = _standardize(x, (2, 3), eps)
    return normalized * gain.reshape(param_shape) + shift.reshape(param_shape)


def l2_normalize(x: Tensor, axis: int = -1, eps: float = 1e-12) -> Tensor:
    norm = ((x * x).sum(axis=axis, keepdims=True) + eps).sqrt()
    return x / norm
