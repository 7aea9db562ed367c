"""Reverse-mode autodiff over numpy arrays.

A Tensor wraps an ndarray plus the closure that routes an upstream
gradient to its parents. backward() walks the graph in reverse
topological order and accumulates into .grad on every node that
requires it. float32 is the training dtype; passing float64 arrays
switches the whole graph to 64-bit (used by the gradient-check suite).

log and sqrt floor their arguments at a tiny positive value so no
operator emits NaN/Inf for finite inputs.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

_EPS_FLOOR = 1e-30

_grad_enabled = True


class no_grad:
    """Context manager that skips graph construction (inference mode)."""

    def __enter__(self):
        global _grad_enabled
        self._prev = _grad_enabled
        _grad_enabled = False
        return self

    def __exit__(self, *exc):
        global _grad_enabled
        _grad_enabled = self._prev
        return False


def grad_enabled() -> bool:
    return _grad_enabled


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a broadcast gradient back down to the original shape."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, dim in enumerate(shape):
        if dim == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "_parents", "_vjp")

    def __init__(self, data, requires_grad: bool = False):
        self.data = np.asarray(data)
        if self.data.dtype not in (np.float32, np.float64):
            self.data = self.data.astype(np.float32)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self._parents: tuple[Tensor, ...] = ()
        self._vjp: Callable[[np.ndarray], Sequence[np.ndarray | None]] | None = None

    # ------------------------------------------------------------------
    # construction of graph nodes
    # ------------------------------------------------------------------

    @staticmethod
    def _result(data: np.ndarray, parents: tuple["Tensor", ...], vjp) -> "Tensor":
        out = Tensor(data)
        if _grad_enabled and any(p.requires_grad for p in parents):
            out.requires_grad = True
            out._parents = parents
            out._vjp = vjp
        return out

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype.name}, requires_grad={self.requires_grad})"

    # ------------------------------------------------------------------
    # backward
    # ------------------------------------------------------------------

    def backward(self, grad: np.ndarray | None = None) -> None:
        if grad is None:
            grad = np.ones_like(self.data)
        grad = np.asarray(grad, dtype=self.data.dtype)

        # iterative reverse topological order
        topo: list[Tensor] = []
        visited: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, processed = stack.pop()
            if processed:
                topo.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in visited:
                    stack.append((p, False))

        flowing: dict[int, np.ndarray] = {id(self): grad}
        for node in reversed(topo):
            g = flowing.pop(id(node), None)
            if g is None:
                continue
            if node.requires_grad:
                node.grad = g if node.grad is None else node.grad + g
            if node._vjp is None:
                continue
            for parent, pg in zip(node._parents, node._vjp(g)):
                if pg is None or not parent.requires_grad:
                    continue
                pg = np.asarray(pg, dtype=parent.data.dtype)
                if id(parent) in flowing:
                    flowing[id(parent)] = flowing[id(parent)] + pg
                else:
                    flowing[id(parent)] = pg

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------

    @staticmethod
    def _coerce(value) -> "Tensor":
        return value if isinstance(value, Tensor) else Tensor(np.asarray(value))

    def __add__(self, other):
        other = self._coerce(other)
        return Tensor._result(
            self.data + other.data,
            (self, other),
            lambda g: (_unbroadcast(g, self.shape), _unbroadcast(g, other.shape)),
        )

    __radd__ = __add__

    def __neg__(self):
        return Tensor._result(-self.data, (self,), lambda g: (-g,))

    def __sub__(self, other):
        other = self._coerce(other)
        return Tensor._result(
            self.data - other.data,
            (self, other),
            lambda g: (_unbroadcast(g, self.shape), _unbroadcast(-g, other.shape)),
        )

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        a, b = self.data, other.data
        return Tensor._result(
            a * b,
            (self, other),
            lambda g: (_unbroadcast(g * b, self.shape), _unbroadcast(g * a, other.shape)),
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        a, b = self.data, other.data
        return Tensor._result(
            a / b,
            (self, other),
            lambda g: (
                _unbroadcast(g / b, self.shape),
                _unbroadcast(-g * a / (b * b), other.shape),
            ),
        )

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, exponent: float):
        a = self.data
        return Tensor._result(
            a**exponent,
            (self,),
            lambda g: (g * exponent * a ** (exponent - 1),),
        )

    def __matmul__(self, other):
        other = self._coerce(other)
        a, b = self.data, other.data
        return Tensor._result(
            a @ b,
            (self, other),
            lambda g: (g @ b.T, a.T @ g),
        )

    # ------------------------------------------------------------------
    # reductions and shape ops
    # ------------------------------------------------------------------

    def sum(self, axis=None, keepdims: bool = False):
        a = self.data

        def vjp(g):
            if axis is None:
                return (np.broadcast_to(g, a.shape).copy(),)
            gg = g if keepdims else np.expand_dims(g, axis)
            return (np.broadcast_to(gg, a.shape).copy(),)

        return Tensor._result(a.sum(axis=axis, keepdims=keepdims), (self,), vjp)

    def mean(self, axis=None, keepdims: bool = False):
        a = self.data
        count = a.size if axis is None else np.prod([a.shape[i] for i in np.atleast_1d(axis)])

        def vjp(g):
            if axis is None:
                return (np.broadcast_to(g / count, a.shape).copy(),)
            gg = g if keepdims else np.expand_dims(g, axis)
            return (np.broadcast_to(gg / count, a.shape).copy(),)

        return Tensor._result(a.mean(axis=axis, keepdims=keepdims), (self,), vjp)

    def reshape(self, *shape):
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        old = self.data.shape
        return Tensor._result(
            self.data.reshape(shape), (self,), lambda g: (g.reshape(old),)
        )

    def transpose(self, *axes):
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        if not axes:
            axes = tuple(reversed(range(self.ndim)))
        inverse = tuple(np.argsort(axes))
        return Tensor._result(
            self.data.transpose(axes), (self,), lambda g: (g.transpose(inverse),)
        )

    # ------------------------------------------------------------------
    # elementwise nonlinearities
    # ------------------------------------------------------------------

    def exp(self):
        out = np.exp(self.data)
        return Tensor._result(out, (self,), lambda g: (g * out,))

    def log(self):
        a = np.maximum(self.data, _EPS_FLOOR)
        return Tensor._result(np.log(a), (self,), lambda g: (g / a,))

    def sqrt(self):
        a = np.maximum(self.data, 0.0)
        out = np.sqrt(a)
        return Tensor._result(out, (self,), lambda g: (g * 0.5 / np.maximum(out, _EPS_FLOOR),))

    def abs(self):
        a = self.data
        return Tensor._result(np.abs(a), (self,), lambda g: (g * np.sign(a),))


class Parameter(Tensor):
    """A named trainable tensor; gradient shape always matches value shape."""

    __slots__ = ("name",)

    def __init__(self, data, name: str = ""):
        super().__init__(np.asarray(data), requires_grad=True)
        self.name = name

    def __repr__(self) -> str:
        return f"Parameter(name={self.name!r}, shape={self.data.shape})"
