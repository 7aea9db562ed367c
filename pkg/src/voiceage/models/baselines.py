"""Nearest-neighbor and linear-SVM baselines over flattened spectrograms."""

from __future__ import annotations

import numpy as np

from voiceage.errors import DegenerateDataError, RangeError, ValidationError
from voiceage.nn.rng import derive_rng


def knn_classify(
    train_features: np.ndarray,
    train_labels: np.ndarray,
    query: np.ndarray,
    k: int = 5,
) -> int:
    """Majority vote among the k nearest points by Euclidean distance.

    Ties break toward the class with the smallest summed distance,
    then toward the lowest class index.
    """
    features = np.asarray(train_features, dtype=np.float64)
    labels = np.asarray(train_labels, dtype=np.int64)
    if features.ndim != 2 or features.shape[0] == 0:
        raise ValidationError(f"training set must be a non-empty 2-D array, got {features.shape}")
    if labels.shape != (features.shape[0],):
        raise ValidationError(f"labels shape {labels.shape} != ({features.shape[0]},)")
    if k < 1:
        raise RangeError(f"k must be >= 1, got {k}")
    q = np.asarray(query, dtype=np.float64).reshape(-1)
    if q.shape[0] != features.shape[1]:
        raise ValidationError(f"query dim {q.shape[0]} != feature dim {features.shape[1]}")

    distances = np.linalg.norm(features - q, axis=1)
    nearest = np.argsort(distances, kind="stable")[: min(k, features.shape[0])]
    best: tuple[int, float, int] | None = None
    for cls in np.unique(labels[nearest]):
        mask = labels[nearest] == cls
        key = (-int(mask.sum()), float(distances[nearest][mask].sum()), int(cls))
        if best is None or key < best:
            best = key
    return best[2]


class LinearSvm:
    """One-vs-rest linear classifier trained by stochastic subgradient descent.

    Each class gets a hinge-loss objective (lambda/2)||w||^2 +
    mean(max(0, 1 - y(wx + b))) with lambda = 1/(C n); all classes
    update together per visited sample. Prediction is max margin.
    """

    def __init__(self, weights: np.ndarray, biases: np.ndarray):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.biases = np.asarray(biases, dtype=np.float64)
        if self.weights.ndim != 2 or self.biases.shape != (self.weights.shape[0],):
            raise ValidationError(
                f"weights {self.weights.shape} and biases {self.biases.shape} disagree"
            )

    @property
    def class_count(self) -> int:
        return self.weights.shape[0]

    def margins(self, x: np.ndarray) -> np.ndarray:
        return self.weights @ np.asarray(x, dtype=np.float64).reshape(-1) + self.biases

    def predict(self, x: np.ndarray) -> int:
        return int(np.argmax(self.margins(x)))

    def predict_batch(self, xs: np.ndarray) -> np.ndarray:
        scores = np.asarray(xs, dtype=np.float64) @ self.weights.T + self.biases
        return np.argmax(scores, axis=1).astype(np.int64)

    @staticmethod
    def train(
        train_features: np.ndarray,
        train_labels: np.ndarray,
        C: float = 1.0,
        epochs: int = 20,
        seed: int = 0,
    ) -> "LinearSvm":
        features = np.asarray(train_features, dtype=np.float64)
        labels = np.asarray(train_labels, dtype=np.int64)
        if features.ndim != 2 or features.shape[0] == 0:
            raise ValidationError(
                f"training set must be a non-empty 2-D array, got {features.shape}"
            )
        if labels.shape != (features.shape[0],):
            raise ValidationError(f"labels shape {labels.shape} != ({features.shape[0]},)")
        if C <= 0:
            raise RangeError(f"C must be > 0, got {C}")
        classes = np.unique(labels)
        if classes.size < 2:
            raise DegenerateDataError(f"need >= 2 classes to train, got {classes.size}")
        class_count = int(classes.max()) + 1

        n, dim = features.shape
        lam = 1.0 / (C * n)
        weights = np.zeros((class_count, dim))
        biases = np.zeros(class_count)
        targets = np.where(labels[:, None] == np.arange(class_count)[None, :], 1.0, -1.0)

        step = 0
        for epoch in range(epochs):
            order = derive_rng(seed, "svm-shuffle", epoch).permutation(n)
            for i in order:
                step += 1
                eta = 1.0 / (lam * step)
                x = features[i]
                y = targets[i]
                active = y * (weights @ x + biases) < 1.0
                weights *= 1.0 - eta * lam
                if active.any():
                    weights[active] += eta * y[active, None] * x[None, :]
                    biases[active] += eta * y[active]
        return LinearSvm(weights, biases)
