"""Loss functions used by the training procedures."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CLIP = 1e-12


@dataclass(frozen=True)
class LossSpec:
    kind: str = "mse"
    threshold: float = 0.5
    bias: float | None = None

    def __post_init__(self):
        if self.kind not in ("mse", "mae_trash", "crossentropy", "thresholded_mse"):
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if self.kind == "thresholded_mse" and not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")


def mse(predictions, targets) -> float:
    p, t = np.asarray(predictions, dtype=float), np.asarray(targets, dtype=float)
    return float(np.mean((p - t) ** 2))


def mae_trash(z_expectations) -> float:
    """(1/m) sum |1 - <Z_trash>|; smooth since <Z> <= 1."""
    z = np.asarray(z_expectations, dtype=float)
    return float(np.mean(np.abs(1.0 - z)))


def crossentropy(probabilities, labels) -> float:
    p = np.clip(np.asarray(probabilities, dtype=float), CLIP, 1.0 - CLIP)
    y = np.asarray(labels, dtype=float)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))))


def thresholded_mse(activations, labels, threshold: float) -> float:
    """MSE between labels and the 0/1 decision rule output (piecewise constant)."""
    acts = np.asarray(activations, dtype=float)
    predicted = (acts > threshold).astype(float)
    return mse(predicted, np.asarray(labels, dtype=float))
