"""Layer modules holding parameters and running statistics.

A Module owns Parameters (trained) and buffers (updated out of band,
e.g. running batch statistics). Both are plain numpy arrays keyed by
dotted names so that whole models serialize to flat name -> array
maps; see voiceage.nn.checkpoint.
"""

from __future__ import annotations

import numpy as np

from voiceage.errors import DimensionError
from voiceage.nn import ops
from voiceage.nn.rng import derive_rng, init_array
from voiceage.nn.tensor import Parameter, Tensor


class Module:
    """Base class; children and parameters discovered via __dict__ order."""

    def named_parameters(self, prefix: str = "") -> list[tuple[str, Parameter]]:
        out: list[tuple[str, Parameter]] = []
        for key, value in vars(self).items():
            name = f"{prefix}.{key}" if prefix else key
            if isinstance(value, Parameter):
                out.append((name, value))
            elif isinstance(value, Module):
                out.extend(value.named_parameters(name))
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        out.extend(item.named_parameters(f"{name}.{i}"))
        return out

    def named_buffers(self, prefix: str = "") -> list[tuple[str, np.ndarray]]:
        out: list[tuple[str, np.ndarray]] = []
        buffer_names = getattr(self, "_buffers", ())
        for key, value in vars(self).items():
            name = f"{prefix}.{key}" if prefix else key
            if key in buffer_names and isinstance(value, np.ndarray):
                out.append((name, value))
            elif isinstance(value, Module):
                out.extend(value.named_buffers(name))
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        out.extend(item.named_buffers(f"{name}.{i}"))
        return out

    def state_arrays(self) -> dict[str, np.ndarray]:
        arrays = {name: p.data for name, p in self.named_parameters()}
        arrays.update({name: b for name, b in self.named_buffers()})
        return arrays

    def load_state(self, arrays: dict[str, np.ndarray]) -> None:
        """Copy values for every parameter and buffer; missing names raise."""
        for name, param in self.named_parameters():
            if name not in arrays:
                raise KeyError(f"checkpoint missing parameter {name!r}")
            src = arrays[name]
            if src.shape != param.data.shape:
                raise DimensionError(f"{name}: shape {src.shape} != {param.data.shape}")
            param.data = src.astype(param.data.dtype)
        for name, buf in self.named_buffers():
            if name not in arrays:
                raise KeyError(f"checkpoint missing buffer {name!r}")
            src = arrays[name]
            if src.shape != buf.shape:
                raise DimensionError(f"{name}: shape {src.shape} != {buf.shape}")
            buf[...] = src.astype(buf.dtype)

    def zero_grad(self) -> None:
        for _, param in self.named_parameters():
            param.grad = None


class Dense(Module):
    def __init__(
        self, in_features: int, out_features: int, seed: int, label: str, bias: bool = True
    ):
        rng = derive_rng(seed, "dense", label)
        self.weight = Parameter(
            init_array(rng, (in_features, out_features), "uniform-fan-in"),
            name=f"{label}.weight",
        )
        self.bias = (
            Parameter(np.zeros(out_features, dtype=np.float32), name=f"{label}.bias")
            if bias
            else None
        )

    def __call__(self, x: Tensor) -> Tensor:
        return ops.dense(x, self.weight, self.bias)


class Conv2d(Module):
    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel_size: int,
        seed: int,
        label: str,
        stride: int = 1,
        padding: int = 0,
        scheme: str = "uniform-fan-in",
        bias: bool = True,
    ):
        rng = derive_rng(seed, "conv2d", label)
        shape = (out_channels, in_channels, kernel_size, kernel_size)
        self.kernel = Parameter(init_array(rng, shape, scheme), name=f"{label}.kernel")
        self.bias = (
            Parameter(np.zeros(out_channels, dtype=np.float32), name=f"{label}.bias")
            if bias
            else None
        )
        self.stride = stride
        self.padding = padding

    def __call__(self, x: Tensor) -> Tensor:
        return ops.conv2d(x, self.kernel, self.bias, stride=self.stride, padding=self.padding)


class BatchNorm(Module):
    """Feature normalization with running statistics for inference."""

    def __init__(self, num_features: int, momentum: float = 0.1, eps: float = 1e-5):
        self._buffers = ("running_mean", "running_var")
        self.gain = Parameter(np.ones(num_features, dtype=np.float32), name="gain")
        self.shift = Parameter(np.zeros(num_features, dtype=np.float32), name="shift")
        self.running_mean = np.zeros(num_features, dtype=np.float32)
        self.running_var = np.ones(num_features, dtype=np.float32)
        self.momentum = momentum
        self.eps = eps

    def __call__(self, x: Tensor, training: bool) -> Tensor:
        return ops.feature_norm(
            x,
            self.gain,
            self.shift,
            training=training,
            running_mean=self.running_mean,
            running_var=self.running_var,
            momentum=self.momentum,
            eps=self.eps,
        )


class InstanceNorm(Module):
    """Per-sample spatial normalization; no running statistics."""

    def __init__(self, num_features: int, eps: float = 1e-5):
        self.gain = Parameter(np.ones(num_features, dtype=np.float32), name="gain")
        self.shift = Parameter(np.zeros(num_features, dtype=np.float32), name="shift")
        self.eps = eps

    def __call__(self, x: Tensor) -> Tensor:
        return ops.instance_norm(x, self.gain, self.shift, eps=self.eps)
