"""CART binary classifier with probabilistic leaves.

Greedy impurity-decrease splitting (gini or entropy, entropy in bits)
over a per-node random feature subset. Leaf probability is the
anomalous fraction of training rows reaching the leaf, which is what
makes the tree usable as a continuous anomaly scorer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch
from .base import FeatureMatrix, LabeledDataset


def gini_impurity(p: np.ndarray) -> np.ndarray:
    return 2.0 * p * (1.0 - p)


def entropy_impurity(p: np.ndarray) -> np.ndarray:
    p = np.clip(p, 0.0, 1.0)
    out = np.zeros_like(p)
    for q in (p, 1.0 - p):
        mask = q > 0.0
        out[mask] -= q[mask] * np.log2(q[mask])
    return out


_IMPURITY = {"gini": gini_impurity, "entropy": entropy_impurity}


@dataclass(frozen=True)
class DecisionTreeParams:
    criterion: str = "entropy"
    splitter: str = "best"
    max_depth: int = 35
    max_features: float = 1.0
    min_samples_leaf: int = 1
    min_samples_split: int = 2
    rng_seed: int = 0

    def __post_init__(self):
        if self.criterion not in _IMPURITY:
            raise ValueError(f"criterion must be gini|entropy, got {self.criterion!r}")
        if self.splitter not in ("best", "random"):
            raise ValueError(f"splitter must be best|random, got {self.splitter!r}")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if not (0.0 < self.max_features <= 1.0):
            raise ValueError("max_features must be in (0, 1]")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")


class DecisionTree:
    """Flat array encoding; feature[i] < 0 marks a leaf."""

    def __init__(self, params: DecisionTreeParams):
        self.params = params
        self.feature: np.ndarray = None
        self.threshold: np.ndarray = None
        self.left: np.ndarray = None
        self.right: np.ndarray = None
        self.leaf_prob: np.ndarray = None
        self.impurity: np.ndarray = None
        self.split_child_impurity: np.ndarray = None  # weighted, for the invariant
        self.d = 0

    # -- training ----------------------------------------------------

    def fit(self, data: LabeledDataset) -> "DecisionTree":
        data.require_both_classes()
        X = data.X.rows
        y = data.y.astype(np.float64)
        n, d = X.shape
        p = self.params
        rng = np.random.default_rng(p.rng_seed)
        impurity_fn = _IMPURITY[p.criterion]
        n_feat = max(1, math.ceil(p.max_features * d))

        feature: list[int] = []
        threshold: list[float] = []
        left: list[int] = []
        right: list[int] = []
        leaf_prob: list[float] = []
        impurity: list[float] = []
        child_imp: list[float] = []

        def node_impurity(labels: np.ndarray) -> float:
            return float(impurity_fn(np.asarray([labels.mean()]))[0])

        def best_split(idx: np.ndarray):
            """Returns (decrease, feature, threshold) or None."""
            labels = y[idx]
            parent = node_impurity(labels)
            total_pos = labels.sum()
            m = idx.size
            feats = rng.permutation(d)[:n_feat]
            best = None
            for f in np.sort(feats):
                col = X[idx, f]
                order = np.argsort(col, kind="stable")
                sv = col[order]
                sy = labels[order]
                if p.splitter == "random":
                    lo, hi = sv[0], sv[-1]
                    if lo >= hi:
                        continue
                    cuts = np.asarray([rng.uniform(lo, hi)])
                    n_left = np.searchsorted(sv, cuts, side="left")
                    pos_left = np.concatenate([[0.0], np.cumsum(sy)])[n_left]
                else:
                    boundary = np.flatnonzero(sv[1:] > sv[:-1])
                    if boundary.size == 0:
                        continue
                    cuts = (sv[boundary] + sv[boundary + 1]) / 2.0
                    n_left = boundary + 1
                    pos_left = np.cumsum(sy)[boundary]
                n_right = m - n_left
                ok = (n_left >= p.min_samples_leaf) & (n_right >= p.min_samples_leaf)
                if not ok.any():
                    continue
                n_left, n_right = n_left[ok], n_right[ok]
                pos_left = pos_left[ok]
                cuts = cuts[ok]
                imp_l = impurity_fn(pos_left / n_left)
                imp_r = impurity_fn((total_pos - pos_left) / n_right)
                weighted = (n_left * imp_l + n_right * imp_r) / m
                k = int(np.argmin(weighted))
                decrease = parent - float(weighted[k])
                if best is None or decrease > best[0] + 1e-15:
                    best = (decrease, int(f), float(cuts[k]), float(weighted[k]))
            return best

        def build(idx: np.ndarray, depth: int) -> int:
            nid = len(feature)
            labels = y[idx]
            prob = float(labels.mean())
            feature.append(-1)
            threshold.append(0.0)
            left.append(-1)
            right.append(-1)
            leaf_prob.append(prob)
            impurity.append(node_impurity(labels))
            child_imp.append(float("nan"))
            if (
                depth >= p.max_depth
                or idx.size < p.min_samples_split
                or prob == 0.0
                or prob == 1.0
            ):
                return nid
            found = best_split(idx)
            if found is None or found[0] <= 0.0:
                return nid
            _, f, cut, weighted = found
            mask = X[idx, f] < cut
            feature[nid] = f
            threshold[nid] = cut
            child_imp[nid] = weighted
            left[nid] = build(idx[mask], depth + 1)
            right[nid] = build(idx[~mask], depth + 1)
            return nid

        build(np.arange(n), 1)
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=np.float64)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.leaf_prob = np.asarray(leaf_prob, dtype=np.float64)
        self.impurity = np.asarray(impurity, dtype=np.float64)
        self.split_child_impurity = np.asarray(child_imp, dtype=np.float64)
        self.d = d
        return self

    # -- inference ---------------------------------------------------

    def _leaves_for(self, rows: np.ndarray) -> np.ndarray:
        node = np.zeros(rows.shape[0], dtype=np.int64)
        active = np.where(self.feature[node] >= 0)[0]
        while active.size:
            nd = node[active]
            go_left = rows[active, self.feature[nd]] < self.threshold[nd]
            node[active] = np.where(go_left, self.left[nd], self.right[nd])
            active = active[self.feature[node[active]] >= 0]
        return node

    def predict_proba(self, X: FeatureMatrix) -> np.ndarray:
        if self.feature is None:
            raise ValueError("tree is not fitted")
        if X.d != self.d:
            raise DimensionMismatch(f"expected {self.d} features, got {X.d}")
        return self.leaf_prob[self._leaves_for(X.rows)]

    @property
    def depth(self) -> int:
        depths = {0: 1}
        out = 1
        for i in range(len(self.feature)):
            if self.feature[i] >= 0:
                for child in (self.left[i], self.right[i]):
                    depths[int(child)] = depths[i] + 1
                    out = max(out, depths[int(child)])
        return out

    @property
    def n_splits(self) -> int:
        return int((self.feature >= 0).sum())

    # -- serialization -----------------------------------------------

    def to_dict(self) -> dict:
        return {
            "model": "dtree",
            "params": {
                "criterion": self.params.criterion,
                "splitter": self.params.splitter,
                "max_depth": self.params.max_depth,
                "max_features": self.params.max_features,
                "min_samples_leaf": self.params.min_samples_leaf,
                "min_samples_split": self.params.min_samples_split,
                "rng_seed": self.params.rng_seed,
            },
            "d": self.d,
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "leaf_prob": self.leaf_prob.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "DecisionTree":
        tree = cls(DecisionTreeParams(**doc["params"]))
        tree.d = doc["d"]
        tree.feature = np.asarray(doc["feature"], dtype=np.int64)
        tree.threshold = np.asarray(doc["threshold"], dtype=np.float64)
        tree.left = np.asarray(doc["left"], dtype=np.int64)
        tree.right = np.asarray(doc["right"], dtype=np.int64)
        tree.leaf_prob = np.asarray(doc["leaf_prob"], dtype=np.float64)
        tree.impurity = np.zeros_like(tree.leaf_prob)
        tree.split_child_impurity = np.zeros_like(tree.leaf_prob)
        return tree


def dtree_fit(data: LabeledDataset, params: DecisionTreeParams) -> DecisionTree:
    return DecisionTree(params).fit(data)
