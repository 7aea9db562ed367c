from voiceage.models.bins import AB, DECADE10, QUARTER25, SCHEMES, AgeBinScheme, age_to_bin
from voiceage.models.vann import (
    CatFusion,
    MfbFusion,
    VannA,
    VannAvCat,
    VannAvMfb,
    VannConfig,
    VannV,
    build_model,
    mel_to_input,
    rgb_to_input,
)
from voiceage.models.baselines import LinearSvm, knn_classify
from voiceage.models.training import (
    ConfusionMatrix,
    EpochRecord,
    LabeledDataset,
    evaluate,
    train_classifier,
)

__all__ = [
    "AB",
    "DECADE10",
    "QUARTER25",
    "SCHEMES",
    "AgeBinScheme",
    "CatFusion",
    "ConfusionMatrix",
    "EpochRecord",
    "LabeledDataset",
    "LinearSvm",
    "MfbFusion",
    "VannA",
    "VannAvCat",
    "VannAvMfb",
    "VannConfig",
    "VannV",
    "age_to_bin",
    "build_model",
    "evaluate",
    "knn_classify",
    "mel_to_input",
    "rgb_to_input",
    "train_classifier",
]
