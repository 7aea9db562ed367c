"""Scalar losses with fused, numerically stable gradients."""

from __future__ import annotations

import numpy as np

from voiceage.errors import DimensionError, RangeError
from voiceage.nn.tensor import Tensor


def cross_entropy(logits: Tensor, labels) -> Tensor:
    """Mean softmax cross-entropy; labels are integer class indices."""
    labels = np.asarray(labels, dtype=np.int64)
    if logits.ndim != 2 or labels.shape != (logits.shape[0],):
        raise DimensionError(
            f"expected logits [N,K] and labels [N], got {logits.shape} and {labels.shape}"
        )
    n, k = logits.shape
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise RangeError(f"labels must be in [0, {k}), got range [{labels.min()}, {labels.max()}]")

    z = logits.data - logits.data.max(axis=1, keepdims=True)
    e = np.exp(z)
    probs = e / e.sum(axis=1, keepdims=True)
    nll = np.log(e.sum(axis=1)) - z[np.arange(n), labels]
    loss = nll.mean()

    def vjp(g):
        grad = probs.copy()
        grad[np.arange(n), labels] -= 1.0
        return (g * grad / n,)

    return Tensor._result(np.asarray(loss, dtype=logits.dtype), (logits,), vjp)


def _coerce_pair(pred: Tensor, target) -> tuple[Tensor, np.ndarray]:
    target_data = target.data if isinstance(target, Tensor) else np.asarray(target, dtype=pred.dtype)
    if np.broadcast_shapes(pred.shape, target_data.shape) != pred.shape:
        raise DimensionError(f"target shape {target_data.shape} does not match {pred.shape}")
    return pred, target_data


def mse(pred: Tensor, target) -> Tensor:
    pred, t = _coerce_pair(pred, target)
    diff = pred.data - t
    loss = np.mean(diff * diff)

    def vjp(g):
        return (g * 2.0 * diff / diff.size,)

    return Tensor._result(np.asarray(loss, dtype=pred.dtype), (pred,), vjp)


def l1(pred: Tensor, target) -> Tensor:
    pred, t = _coerce_pair(pred, target)
    diff = pred.data - t
    loss = np.mean(np.abs(diff))

    def vjp(g):
        return (g * np.sign(diff) / diff.size,)

    return Tensor._result(np.asarray(loss, dtype=pred.dtype), (pred,), vjp)
