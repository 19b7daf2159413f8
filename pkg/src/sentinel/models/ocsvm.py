"""Linear nu-one-class SVM trained by projected subgradient descent.

Minimizes 0.5*||w||^2 - rho + (1/(nu*n)) * sum_i max(0, rho - <w, x_i>).
The offset rho is solved in closed form each epoch as the ceil(nu*n)-th
smallest projection, which pins the training anomaly fraction below nu
by construction. Points with decision value <w, x> - rho < 0 are
anomalous.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch
from .base import AnomalyLabeling, FeatureMatrix


@dataclass(frozen=True)
class OcsvmParams:
    nu: float = 0.1
    kernel: str = "linear"
    learning_rate: float = 0.1
    epochs: int = 400
    tolerance: float = 1e-6
    rng_seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.nu <= 1.0):
            raise ValueError("nu must be in (0, 1]")
        if self.kernel != "linear":
            raise ValueError(f"unsupported kernel {self.kernel!r}")
        if self.learning_rate <= 0 or self.epochs < 1:
            raise ValueError("invalid optimizer controls")


class OneClassSvm:
    def __init__(self, params: OcsvmParams):
        self.params = params
        self.w: np.ndarray = None
        self.rho: float = 0.0
        self.d = 0
        self.converged = False

    def _objective(self, X: np.ndarray, w: np.ndarray, rho: float) -> float:
        slack = np.maximum(0.0, rho - X @ w)
        return 0.5 * float(w @ w) - rho + slack.sum() / (self.params.nu * X.shape[0])

    @staticmethod
    def _rho_for(projections: np.ndarray, nu: float) -> float:
        k = int(np.ceil(nu * projections.shape[0]))
        k = min(max(k, 1), projections.shape[0])
        return float(np.partition(projections, k - 1)[k - 1])

    def fit(self, X: FeatureMatrix) -> "OneClassSvm":
        rows = X.rows
        n, d = rows.shape
        if n < 2:
            raise ValueError("one-class SVM needs n >= 2")
        p = self.params
        rng = np.random.default_rng(p.rng_seed)
        inv = 1.0 / (p.nu * n)
        w = rng.normal(scale=1e-3, size=d)
        best_w, best_rho = w.copy(), 0.0
        best_obj = np.inf
        prev_obj = np.inf
        self.converged = False
        for t in range(p.epochs):
            proj = rows @ w
            rho = self._rho_for(proj, p.nu)
            grad = w - inv * rows[proj < rho].sum(axis=0)
            w = w - (p.learning_rate / np.sqrt(t + 1.0)) * grad
            obj = self._objective(rows, w, self._rho_for(rows @ w, p.nu))
            if obj < best_obj:
                best_obj = obj
                best_w = w.copy()
            if abs(prev_obj - obj) <= p.tolerance * max(1.0, abs(obj)):
                self.converged = True
                break
            prev_obj = obj
        self.w = best_w
        self.rho = self._rho_for(rows @ best_w, p.nu)
        self.d = d
        return self

    def decision(self, X: FeatureMatrix) -> np.ndarray:
        if self.w is None:
            raise ValueError("model is not fitted")
        if X.d != self.d:
            raise DimensionMismatch(f"expected {self.d} features, got {X.d}")
        return X.rows @ self.w - self.rho

    def label(self, X: FeatureMatrix) -> AnomalyLabeling:
        f = self.decision(X)
        return AnomalyLabeling(labels=f < 0.0, raw_scores=-f, degenerate=not self.converged)


def ocsvm_fit(X: FeatureMatrix, params: OcsvmParams) -> OneClassSvm:
    return OneClassSvm(params).fit(X)
