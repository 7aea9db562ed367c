"""Bias-corrected Adam."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from voiceage.errors import DimensionError
from voiceage.nn.tensor import Parameter


@dataclass
class AdamState:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)


def adam_step(state: AdamState, named_params: list[tuple[str, Parameter]]) -> None:
    """One in-place update; missing gradients count as zero."""
    state.step += 1
    bc1 = 1.0 - state.beta1**state.step
    bc2 = 1.0 - state.beta2**state.step
    for name, param in named_params:
        grad = param.grad
        if grad is None:
            grad = np.zeros_like(param.data)
        if grad.shape != param.data.shape:
            raise DimensionError(f"gradient shape {grad.shape} != parameter {param.data.shape}")
        m = state.m.setdefault(name, np.zeros_like(param.data))
        v = state.v.setdefault(name, np.zeros_like(param.data))
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * grad * grad
        m_hat = m / bc1
        v_hat = v / bc2
        param.data = param.data - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)


class Adam:
    """Optimizer facade over adam_step with checkpointable state."""

    def __init__(
        self,
        named_params: list[tuple[str, Parameter]],
        lr: float = 1e-3,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ):
        self.named_params = list(named_params)
        self.state = AdamState(lr=lr, beta1=beta1, beta2=beta2, eps=eps)

    def step(self) -> None:
        adam_step(self.state, self.named_params)

    def zero_grad(self) -> None:
        for _, param in self.named_params:
            param.grad = None

    def state_arrays(self, prefix: str = "optim") -> dict[str, np.ndarray]:
        arrays = {f"{prefix}.step": np.array([self.state.step], dtype=np.float32)}
        for name, _ in self.named_params:
            if name in self.state.m:
                arrays[f"{prefix}.m.{name}"] = self.state.m[name]
                arrays[f"{prefix}.v.{name}"] = self.state.v[name]
        return arrays

    def load_state(self, arrays: dict[str, np.ndarray], prefix: str = "optim") -> None:
        self.state.step = int(arrays[f"{prefix}.step"][0])
        for name, param in self.named_params:
            key = f"{prefix}.m.{name}"
            if key in arrays:
                self.state.m[name] = arrays[key].astype(param.data.dtype).reshape(param.data.shape)
                self.state.v[name] = (
                    arrays[f"{prefix}.v.{name}"].astype(param.data.dtype).reshape(param.data.shape)
                )
