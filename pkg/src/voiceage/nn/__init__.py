from voiceage.nn.tensor import Tensor, Parameter, no_grad
from voiceage.nn import ops
from voiceage.nn.ops import (
    concat,
    conv2d,
    dense,
    feature_norm,
    instance_norm,
    leaky_relu,
    relu,
    sigmoid,
    signed_sqrt,
    softmax,
    tanh,
    upsample_nearest2x,
)
from voiceage.nn.losses import cross_entropy, l1, mse
from voiceage.nn.layers import BatchNorm, Conv2d, Dense, InstanceNorm, Module
from voiceage.nn.optim import Adam, AdamState, adam_step
from voiceage.nn.rng import derive_rng, seeded_init
from voiceage.nn.checkpoint import (
    load_checkpoint,
    load_checkpoint_bytes,
    save_checkpoint,
    save_checkpoint_bytes,
)

__all__ = [
    "Adam",
    "AdamState",
    "BatchNorm",
    "Conv2d",
    "Dense",
    "InstanceNorm",
    "Module",
    "Parameter",
    "Tensor",
    "adam_step",
    "concat",
    "conv2d",
    "cross_entropy",
    "dense",
    "derive_rng",
    "feature_norm",
    "instance_norm",
    "l1",
    "leaky_relu",
    "load_checkpoint",
    "load_checkpoint_bytes",
    "mse",
    "no_grad",
    "ops",
    "relu",
    "save_checkpoint",
    "save_checkpoint_bytes",
    "seeded_init",
    "sigmoid",
    "signed_sqrt",
    "softmax",
    "tanh",
    "upsample_nearest2x",
]
