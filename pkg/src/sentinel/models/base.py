"""Shared dataset containers for the model layer."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch, SingleClass


@dataclass(frozen=True)
class FeatureMatrix:
    """n observations x d features, with one name per column.

    Rejects NaN/infinite entries and degenerate shapes at construction.
    """

    rows: np.ndarray
    feature_names: tuple[str, ...]

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise ValueError(f"rows must be 2-D, got shape {rows.shape}")
        if rows.shape[0] < 1 or rows.shape[1] < 1:
            raise ValueError(f"need n >= 1 and d >= 1, got shape {rows.shape}")
        if not np.all(np.isfinite(rows)):
            raise ValueError("rows contain NaN or infinite entries")
        names = tuple(self.feature_names)
        if len(names) != rows.shape[1]:
            raise ValueError(
                f"{len(names)} feature names for {rows.shape[1]} columns"
            )
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    @property
    def d(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class AnomalyLabeling:
    """Per-row anomaly verdicts; higher raw score = more anomalous."""

    labels: np.ndarray          # bool, shape (n,)
    raw_scores: np.ndarray      # float, shape (n,)
    clusters: np.ndarray = None  # int cluster ids (density models only)
    degenerate: bool = False

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=bool)
        scores = np.asarray(self.raw_scores, dtype=np.float64)
        if labels.shape != scores.shape:
            raise ValueError("labels and raw_scores must have the same length")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "raw_scores", scores)

    @property
    def n_anomalies(self) -> int:
        return int(self.labels.sum())


@dataclass(frozen=True)
class LabeledDataset:
    X: FeatureMatrix
    y: np.ndarray  # bool, true = anomalous

    def __post_init__(self):
        y = np.asarray(self.y, dtype=bool)
        if y.shape != (self.X.n,):
            raise ValueError(f"y has shape {y.shape}, expected ({self.X.n},)")
        object.__setattr__(self, "y", y)

    def require_both_classes(self):
        if self.y.all() or not self.y.any():
            raise SingleClass("training labels contain a single class")


def check_dims(X: FeatureMatrix, d: int):
    if X.d != d:
        raise DimensionMismatch(f"expected {d} features, got {X.d}")
