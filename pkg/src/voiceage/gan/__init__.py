from voiceage.gan.nets import Discriminator, Generator, ResidualBlock
from voiceage.gan.training import (
    CycleGanConfig,
    CycleGanModel,
    DomainPair,
    LossReport,
    StepLosses,
    compute_losses,
    generator_total,
    train,
)
from voiceage.gan.transform import (
    denormalize_image,
    normalize_image,
    transform_audio,
    transform_spectrogram,
)

__all__ = [
    "CycleGanConfig",
    "CycleGanModel",
    "Discriminator",
    "DomainPair",
    "Generator",
    "LossReport",
    "ResidualBlock",
    "StepLosses",
    "compute_losses",
    "denormalize_image",
    "generator_total",
    "normalize_image",
    "train",
    "transform_audio",
    "transform_spectrogram",
]
