"""Isolation forest anomaly labeler built from scratch.

Trees randomly partition the feature space so isolated points reach
external nodes in fewer splits than points inside dense regions. The
anomaly score for x is 2^(-E[h(x)]/c(psi)) where h is the path length
(with the usual external-node adjustment) and c(m) the expected path
length of an unsuccessful search in a binary search tree of m points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import DimensionMismatch
from .base import AnomalyLabeling, FeatureMatrix

EULER_GAMMA = 0.5772156649


def average_path_adjustment(m: Union[int, np.ndarray]) -> Union[float, np.ndarray]:
    """c(m) = 2*H(m-1) - 2*(m-1)/m, with c(0) = c(1) = 0.

    H(k) is the exact harmonic sum for k <= 20 and ln(k) + gamma above.
    """
    scalar = np.isscalar(m)
    m_arr = np.atleast_1d(np.asarray(m, dtype=np.float64))
    out = np.zeros_like(m_arr)
    big = m_arr > 21
    out[big] = 2.0 * (np.log(m_arr[big] - 1.0) + EULER_GAMMA) - 2.0 * (m_arr[big] - 1.0) / m_arr[big]
    small = (m_arr >= 2) & ~big
    if small.any():
        harm = np.concatenate([[0.0], np.cumsum(1.0 / np.arange(1, 21))])
        k = (m_arr[small] - 1).astype(int)
        out[small] = 2.0 * harm[k] - 2.0 * (m_arr[small] - 1.0) / m_arr[small]
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class IsolationForestParams:
    n_estimators: int = 100
    max_samples: Union[int, float] = 256
    max_features: float = 1.0
    bootstrap: bool = False
    contamination: float = 0.01
    rng_seed: int = 0

    def __post_init__(self):
        if self.n_estimators < 1:
            raise ValueError("n_estimators must be >= 1")
        if isinstance(self.max_samples, float) and not (0.0 < self.max_samples <= 1.0):
            raise ValueError("fractional max_samples must be in (0, 1]")
        if isinstance(self.max_samples, int) and self.max_samples < 2:
            raise ValueError("integer max_samples must be >= 2")
        if not (0.0 < self.max_features <= 1.0):
            raise ValueError("max_features must be in (0, 1]")
        if not (0.0 < self.contamination <= 0.5):
            raise ValueError("contamination must be in (0, 0.5]")


class _Tree:
    """Flat array encoding: feature[i] < 0 marks an external node."""

    __slots__ = ("feature", "threshold", "left", "right", "adjustment")

    def __init__(self, feature, threshold, left, right, sizes):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.adjustment = average_path_adjustment(np.asarray(sizes, dtype=np.float64))

    @property
    def n_splits(self) -> int:
        return int((self.feature >= 0).sum())

    def path_lengths(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=np.int64)
        depth = np.zeros(X.shape[0], dtype=np.float64)
        active = np.where(self.feature[node] >= 0)[0]
        while active.size:
            nd = node[active]
            go_left = X[active, self.feature[nd]] < self.threshold[nd]
            node[active] = np.where(go_left, self.left[nd], self.right[nd])
            depth[active] += 1.0
            active = active[self.feature[node[active]] >= 0]
        return depth + self.adjustment[node]


def _build_tree(Xs: np.ndarray, features: np.ndarray, depth_cap: int, rng) -> _Tree:
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    sizes: list[int] = []

    def build(idx: np.ndarray, depth: int) -> int:
        nid = len(feature)
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        sizes.append(len(idx))
        if depth >= depth_cap or len(idx) <= 1:
            return nid
        cols = Xs[np.ix_(idx, features)]
        lo = cols.min(axis=0)
        hi = cols.max(axis=0)
        usable = np.where(lo < hi)[0]
        if usable.size == 0:
            return nid
        pick = usable[rng.integers(usable.size)]
        f = int(features[pick])
        p = rng.uniform(lo[pick], hi[pick])
        mask = Xs[idx, f] < p
        feature[nid] = f
        threshold[nid] = p
        left[nid] = build(idx[mask], depth + 1)
        right[nid] = build(idx[~mask], depth + 1)
        return nid

    build(np.arange(Xs.shape[0]), 0)
    return _Tree(feature, threshold, left, right, sizes)


class IsolationForest:
    def __init__(self, params: IsolationForestParams):
        self.params = params
        self.trees: list[_Tree] = []
        self.d = 0
        self.subsample_size = 0
        self.degenerate = False

    def fit(self, X: FeatureMatrix) -> "IsolationForest":
        rows = X.rows
        n, d = rows.shape
        if n < 2:
            raise ValueError("isolation forest needs n >= 2")
        p = self.params
        rng = np.random.default_rng(p.rng_seed)
        psi = p.max_samples
        if isinstance(psi, float):
            psi = max(2, int(round(psi * n)))
        psi = min(psi, n)
        n_feat = max(1, math.ceil(p.max_features * d))
        depth_cap = math.ceil(math.log2(psi))
        self.d = d
        self.subsample_size = psi
        self.degenerate = bool(np.all(rows == rows[0]))
        self.trees = []
        for _ in range(p.n_estimators):
            if p.bootstrap:
                idx = rng.integers(n, size=psi)
            else:
                idx = rng.permutation(n)[:psi]
            feats = rng.permutation(d)[:n_feat]
            self.trees.append(_build_tree(rows[idx], np.sort(feats), depth_cap, rng))
        return self

    def score(self, X: FeatureMatrix) -> np.ndarray:
        """Raw anomaly scores in (0, 1); higher = more isolated."""
        if not self.trees:
            raise ValueError("forest is not fitted")
        if X.d != self.d:
            raise DimensionMismatch(f"expected {self.d} features, got {X.d}")
        total = np.zeros(X.n, dtype=np.float64)
        for tree in self.trees:
            total += tree.path_lengths(X.rows)
        mean_path = total / len(self.trees)
        return np.power(2.0, -mean_path / average_path_adjustment(self.subsample_size))

    def label(self, X: FeatureMatrix, contamination: float = None) -> AnomalyLabeling:
        """Threshold raw scores at the (1 - contamination) quantile.

        Ties at the threshold stay normal (strictly-greater comparison).
        """
        c = self.params.contamination if contamination is None else contamination
        if not (0.0 < c <= 0.5):
            raise ValueError("contamination must be in (0, 0.5]")
        raw = self.score(X)
        threshold = float(np.quantile(raw, 1.0 - c))
        return AnomalyLabeling(labels=raw > threshold, raw_scores=raw, degenerate=self.degenerate)


def iforest_fit(X: FeatureMatrix, params: IsolationForestParams) -> IsolationForest:
    return IsolationForest(params).fit(X)
