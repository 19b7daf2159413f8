"""Synthetic outlier injection for anomaly-free training sets.

When the unsupervised labeler finds nothing anomalous, the supervised
stage still needs both classes. A small random subset of rows is
copied and every feature of each copy is pushed sigma_shift standard
deviations away (independent random sign per feature); the copies are
appended with anomalous labels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import TooFewRows
from ..models.base import FeatureMatrix, LabeledDataset


@dataclass(frozen=True)
class OutlierConfig:
    fraction: float = 0.02
    sigma_shift: float = 3.0
    min_count: int = 3
    # inject when the labeler found fewer natural anomalies than this;
    # 1 keeps the strict only-when-none behavior
    min_anomalies: int = 1
    # "all": shift every feature of each copy (independent random signs).
    # "axis": shift exactly one feature per copy, cycling features and
    # alternating signs, so every +/- metric direction gets an anomalous
    # example; matches single-metric fault shapes (cpu spike, mem leak)
    # and keeps axis-aligned learners from collapsing onto one feature.
    shift_features: str = "all"

    def __post_init__(self):
        if not (0.0 < self.fraction < 0.5):
            raise ValueError("fraction must be in (0, 0.5)")
        if self.sigma_shift <= 0:
            raise ValueError("sigma_shift must be > 0")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")
        if self.min_anomalies < 1:
            raise ValueError("min_anomalies must be >= 1")
        if self.shift_features not in ("all", "axis"):
            raise ValueError("shift_features must be all|axis")


def inject_synthetic_outliers(
    X: FeatureMatrix,
    labels: np.ndarray,
    config: OutlierConfig,
    rng: np.random.Generator,
) -> LabeledDataset:
    labels = np.asarray(labels, dtype=bool)
    n = X.n
    if n < config.min_count:
        raise TooFewRows(f"{n} rows, need at least {config.min_count}")
    count = max(config.min_count, math.ceil(config.fraction * n))
    count = min(count, n)
    chosen = rng.choice(n, size=count, replace=False)
    sigma = X.rows.std(axis=0)  # zero-variance features stay put
    if config.shift_features == "axis":
        shift = np.zeros((count, X.d))
        for i in range(count):
            feature = i % X.d
            sign = 1.0 if (i // X.d) % 2 == 0 else -1.0
            shift[i, feature] = sign * config.sigma_shift * sigma[feature]
    else:
        signs = np.where(rng.random((count, X.d)) < 0.5, -1.0, 1.0)
        shift = signs * config.sigma_shift * sigma
    synthetic = X.rows[chosen] + shift
    rows = np.vstack([X.rows, synthetic])
    y = np.concatenate([labels, np.ones(count, dtype=bool)])
    return LabeledDataset(FeatureMatrix(rows, X.feature_names), y)
