"""Density-based clustering with noise points treated as anomalies.

Classic DBSCAN over euclidean distance with brute-force neighborhoods:
a point is core when its eps-ball (self included) holds at least
min_samples points; clusters grow breadth-first from core points in
index order; points reachable from no core point are noise.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .base import AnomalyLabeling, FeatureMatrix

NOISE = -1


@dataclass(frozen=True)
class DbscanParams:
    eps: float
    min_samples: int
    metric: str = "euclidean"

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be > 0")
        if self.min_samples < 1:
            raise ValueError("min_samples must be >= 1")
        if self.metric != "euclidean":
            raise ValueError(f"unsupported metric {self.metric!r}")


def dbscan_label(X: FeatureMatrix, params: DbscanParams) -> AnomalyLabeling:
    rows = X.rows
    n = rows.shape[0]
    # squared distances by direct differencing; memory is fine at the
    # retention sizes this pipeline keeps
    diff = rows[:, None, :] - rows[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    within = sq <= params.eps * params.eps
    core = within.sum(axis=1) >= params.min_samples

    clusters = np.zeros(n, dtype=np.int64)  # 0 = unvisited
    current = 0
    for i in range(n):
        if clusters[i] != 0:
            continue
        if not core[i]:
            clusters[i] = NOISE
            continue
        current += 1
        clusters[i] = current
        frontier = deque([i])
        while frontier:
            j = frontier.popleft()
            for k in np.flatnonzero(within[j]):
                if clusters[k] == NOISE:
                    clusters[k] = current  # noise becomes border
                elif clusters[k] == 0:
                    clusters[k] = current
                    if core[k]:
                        frontier.append(k)
    noise = clusters == NOISE
    return AnomalyLabeling(
        labels=noise,
        raw_scores=noise.astype(np.float64),
        clusters=clusters,
    )
