"""Evaluation metrics: silhouette for groupings, F1 for classifiers.

Silhouette per sample is (b - a) / max(a, b) with a the mean distance
to the sample's own group (self excluded) and b the smallest mean
distance to any other group; singleton-group samples contribute 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateGrouping
from .models.base import FeatureMatrix


def pairwise_distances(rows: np.ndarray) -> np.ndarray:
    diff = rows[:, None, :] - rows[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def silhouette_samples(
    X: FeatureMatrix,
    assignment: np.ndarray,
    distances: Optional[np.ndarray] = None,
) -> np.ndarray:
    assignment = np.asarray(assignment)
    n = X.n
    if assignment.shape != (n,):
        raise ValueError(f"assignment has shape {assignment.shape}, expected ({n},)")
    if n < 3:
        raise DegenerateGrouping(f"need n >= 3 samples, got {n}")
    groups = np.unique(assignment)
    if groups.size < 2:
        raise DegenerateGrouping("need at least 2 distinct non-empty groups")
    D = pairwise_distances(X.rows) if distances is None else distances

    masks = {g: assignment == g for g in groups}
    sizes = {g: int(masks[g].sum()) for g in groups}
    # mean distance from every sample to every group, vectorized
    mean_to = {g: D[:, masks[g]].sum(axis=1) / sizes[g] for g in groups}

    s = np.zeros(n)
    for g in groups:
        idx = np.flatnonzero(masks[g])
        if sizes[g] == 1:
            continue  # singleton contributes 0
        a = (mean_to[g][idx] * sizes[g]) / (sizes[g] - 1)  # exclude self-distance 0
        b = np.min(
            np.stack([mean_to[h][idx] for h in groups if h != g], axis=1), axis=1
        )
        s[idx] = (b - a) / np.maximum(a, b)
    return s


def silhouette_score(
    X: FeatureMatrix,
    assignment: np.ndarray,
    distances: Optional[np.ndarray] = None,
) -> float:
    return float(silhouette_samples(X, assignment, distances).mean())


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    fn: int
    tn: int

    def __post_init__(self):
        for name in ("tp", "fp", "fn", "tn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    @property
    def f1_defined(self) -> bool:
        return (self.tp + self.fp + self.fn) > 0


def confusion_counts(predicted: np.ndarray, actual: np.ndarray) -> ConfusionCounts:
    predicted = np.asarray(predicted, dtype=bool)
    actual = np.asarray(actual, dtype=bool)
    return ConfusionCounts(
        tp=int((predicted & actual).sum()),
        fp=int((predicted & ~actual).sum()),
        fn=int((~predicted & actual).sum()),
        tn=int((~predicted & ~actual).sum()),
    )


def f1_score(c: ConfusionCounts) -> float:
    """F1 = tp / (tp + 0.5*(fp + fn)); 0.0 when undefined (no positives
    anywhere), distinguishable via ``c.f1_defined``."""
    if not c.f1_defined:
        return 0.0
    return c.tp / (c.tp + 0.5 * (c.fp + c.fn))
