"""Classifier training and evaluation.

Minibatch Adam over shuffled epochs. Every epoch's permutation is
derived from (seed, epoch), so an interrupted run resumed from a
checkpoint replays exactly the batches an uninterrupted run would
have seen; together with the serialized optimizer moments this makes
resume bit-exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from voiceage import nn
from voiceage.errors import DimensionError, StratificationError, ValidationError
from voiceage.models.vann import VannConfig
from voiceage.nn.rng import derive_rng

LOG_HEADER = "epoch\ttrain_loss\ttest_acc"


@dataclass(frozen=True)
class LabeledDataset:
    """Channels-first inputs with integer class labels.

    The optional visual array carries the second modality for fusion
    models; single-modality models ignore it.
    """

    inputs: np.ndarray
    labels: np.ndarray
    visual: np.ndarray | None = None

    def __post_init__(self) -> None:
        inputs = np.asarray(self.inputs, dtype=np.float32)
        labels = np.asarray(self.labels, dtype=np.int64)
        if inputs.ndim != 4:
            raise DimensionError(f"inputs must be (N, C, H, W), got {inputs.shape}")
        if labels.shape != (inputs.shape[0],):
            raise DimensionError(f"labels shape {labels.shape} != ({inputs.shape[0]},)")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "labels", labels)
        if self.visual is not None:
            visual = np.asarray(self.visual, dtype=np.float32)
            if visual.ndim != 4 or visual.shape[0] != inputs.shape[0]:
                raise DimensionError(
                    f"visual must be (N, C, H, W) with N={inputs.shape[0]}, got {visual.shape}"
                )
            object.__setattr__(self, "visual", visual)

    def __len__(self) -> int:
        return self.inputs.shape[0]


@dataclass(frozen=True)
class ConfusionMatrix:
    """K x K counts, rows = truth, columns = prediction."""

    counts: np.ndarray
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
            raise DimensionError(f"counts must be square, got {counts.shape}")
        if len(self.labels) != counts.shape[0]:
            raise DimensionError(
                f"{counts.shape[0]} classes need {counts.shape[0]} labels, got {len(self.labels)}"
            )
        if np.any(counts < 0):
            raise ValidationError("counts must be non-negative")
        counts = counts.copy()
        counts.flags.writeable = False
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "labels", tuple(self.labels))

    @staticmethod
    def from_predictions(
        truth: np.ndarray, predicted: np.ndarray, labels: tuple[str, ...]
    ) -> "ConfusionMatrix":
        truth = np.asarray(truth, dtype=np.int64)
        predicted = np.asarray(predicted, dtype=np.int64)
        if truth.shape != predicted.shape:
            raise DimensionError(f"truth {truth.shape} != predicted {predicted.shape}")
        k = len(labels)
        if truth.size and (truth.min() < 0 or truth.max() >= k):
            raise ValidationError(f"truth labels outside [0, {k})")
        if predicted.size and (predicted.min() < 0 or predicted.max() >= k):
            raise ValidationError(f"predictions outside [0, {k})")
        counts = np.zeros((k, k), dtype=np.int64)
        np.add.at(counts, (truth, predicted), 1)
        return ConfusionMatrix(counts, labels)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        total = self.total
        return float(np.trace(self.counts)) / total if total else 0.0

    def per_class_accuracy(self) -> np.ndarray:
        row_sums = self.counts.sum(axis=1)
        diag = np.diag(self.counts).astype(np.float64)
        return np.divide(diag, row_sums, out=np.zeros_like(diag), where=row_sums > 0)

    def to_csv(self) -> str:
        lines = ["," + ",".join(self.labels)]
        for label, row in zip(self.labels, self.counts):
            lines.append(label + "," + ",".join(str(int(v)) for v in row))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_loss: float
    test_acc: float

    def line(self) -> str:
        return f"{self.epoch}\t{self.train_loss:.6f}\t{self.test_acc:.4f}"


def _batch_logits(model: nn.Module, dataset: LabeledDataset, idx: np.ndarray, training: bool):
    x = nn.Tensor(dataset.inputs[idx])
    if dataset.visual is not None:
        return model(x, nn.Tensor(dataset.visual[idx]), training=training)
    return model(x, training=training)


def predict(model: nn.Module, dataset: LabeledDataset, batch_size: int = 64) -> np.ndarray:
    """Argmax class per sample, batched, without building graphs."""
    out = np.empty(len(dataset), dtype=np.int64)
    with nn.no_grad():
        for start in range(0, len(dataset), batch_size):
            idx = np.arange(start, min(start + batch_size, len(dataset)))
            logits = _batch_logits(model, dataset, idx, training=False)
            out[idx] = np.argmax(logits.data, axis=1)
    return out


def evaluate(
    model: nn.Module,
    dataset: LabeledDataset,
    labels: tuple[str, ...] | None = None,
    batch_size: int = 64,
) -> tuple[float, ConfusionMatrix]:
    """Accuracy and confusion matrix over a labeled set."""
    if len(dataset) == 0:
        raise ValidationError("cannot evaluate an empty dataset")
    if dataset.labels.min() < 0:
        raise ValidationError("evaluation requires labels >= 0 on every entry")
    k = model.config.class_count
    if labels is None:
        labels = tuple(str(i) for i in range(k))
    predicted = predict(model, dataset, batch_size)
    matrix = ConfusionMatrix.from_predictions(dataset.labels, predicted, labels)
    return matrix.accuracy, matrix


def _check_stratified(labels: np.ndarray, class_count: int) -> None:
    present = set(int(v) for v in np.unique(labels))
    missing = [c for c in range(class_count) if c not in present]
    if missing:
        raise StratificationError(f"classes missing from training split: {missing}")


def train_classifier(
    model: nn.Module,
    config: VannConfig,
    train_set: LabeledDataset,
    test_set: LabeledDataset | None = None,
    seed: int = 0,
    log_path: str | Path | None = None,
    checkpoint_path: str | Path | None = None,
    resume: bool = False,
) -> list[EpochRecord]:
    """Train for config.epochs epochs; returns the per-epoch records.

    With resume=True and an existing checkpoint, training restarts
    after the last completed epoch and reproduces the uninterrupted
    run exactly.
    """
    if len(train_set) == 0:
        raise ValidationError("training set is empty")
    if train_set.labels.min() < 0:
        raise ValidationError("training requires labels >= 0 on every entry")
    _check_stratified(train_set.labels, config.class_count)

    optimizer = nn.Adam(model.named_parameters(), lr=config.learning_rate)
    start_epoch = 0
    if resume:
        if checkpoint_path is None:
            raise ValidationError("resume requires a checkpoint path")
        arrays = nn.load_checkpoint(checkpoint_path)
        model.load_state(arrays)
        optimizer.load_state(arrays)
        start_epoch = int(arrays["train.epoch"][0])

    records: list[EpochRecord] = []
    n = len(train_set)
    for epoch in range(start_epoch, config.epochs):
        order = derive_rng(seed, "shuffle", epoch).permutation(n)
        losses = []
        for start in range(0, n, config.batch_size):
            idx = order[start : start + config.batch_size]
            logits = _batch_logits(model, train_set, idx, training=True)
            loss = nn.cross_entropy(logits, train_set.labels[idx])
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            losses.append(float(loss.data))
        test_acc = math.nan
        if test_set is not None:
            test_acc, _ = evaluate(model, test_set)
        records.append(EpochRecord(epoch + 1, float(np.mean(losses)), test_acc))
        if checkpoint_path is not None:
            arrays = dict(model.state_arrays())
            arrays.update(optimizer.state_arrays())
            arrays["train.epoch"] = np.array([epoch + 1], dtype=np.float32)
            nn.save_checkpoint(checkpoint_path, arrays)

    if log_path is not None:
        lines = [LOG_HEADER] + [r.line() for r in records]
        Path(log_path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return records
