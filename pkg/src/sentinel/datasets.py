"""Synthetic benchmark data and feature-file I/O.

The benchmark mirrors resource-metric geometry: a Gaussian baseline
cloud living away from the origin (healthy components have nonzero
cpu/memory/network activity) plus a small fraction of outliers shifted
toward and past the origin, the signature of hung or starved
components whose activity collapses. A toward-origin shift keeps the
partition representable by every bundled model family, including the
origin-separating linear one-class SVM. Ground truth is returned for
evaluation; the models never see it.
"""

from __future__ import annotations

import numpy as np

from .models.base import FeatureMatrix


def make_benchmark(
    seed: int = 0,
    n: int = 1000,
    d: int = 4,
    anomaly_fraction: float = 0.02,
    shift: float = 12.0,
) -> tuple[FeatureMatrix, np.ndarray]:
    rng = np.random.default_rng(seed)
    n_anom = max(1, int(round(anomaly_fraction * n)))
    base_mean = rng.uniform(2.0, 6.0, size=d)
    rows = rng.normal(base_mean, 1.0, size=(n, d))
    direction = -(base_mean + rng.normal(scale=0.5, size=d))
    direction /= np.linalg.norm(direction)
    truth = np.zeros(n, dtype=bool)
    anom_idx = rng.choice(n, size=n_anom, replace=False)
    rows[anom_idx] += shift * direction
    truth[anom_idx] = True
    names = tuple(f"f{i}" for i in range(d))
    return FeatureMatrix(rows, names), truth


def save_feature_csv(path: str, X: FeatureMatrix, labels: np.ndarray = None) -> None:
    header = list(X.feature_names)
    columns = [X.rows]
    if labels is not None:
        header.append("label")
        columns.append(np.asarray(labels, dtype=float)[:, None])
    data = np.hstack(columns)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in data:
            fh.write(",".join(f"{v:.10g}" for v in row) + "\n")


def load_feature_csv(path: str) -> tuple[FeatureMatrix, np.ndarray]:
    """Returns (features, labels); labels is None without a label column."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header:
            raise ValueError(f"{path}: empty feature file")
        names = [h.strip() for h in header.split(",")]
        rows = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            values = [float(v) for v in line.split(",")]
            if len(values) != len(names):
                raise ValueError(f"{path}:{lineno}: expected {len(names)} columns")
            rows.append(values)
    data = np.asarray(rows, dtype=np.float64)
    if data.size == 0:
        raise ValueError(f"{path}: no data rows")
    labels = None
    if names and names[-1] == "label":
        labels = data[:, -1] > 0.5
        data = data[:, :-1]
        names = names[:-1]
    return FeatureMatrix(data, tuple(names)), labels
