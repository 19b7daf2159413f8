"""Logistic regression with l1 (proximal) or l2 (gradient) regularization.

Objective: (1/n) * sum_i log(1 + exp(-t_i * (w.x_i + b))) + P(w)/(C*n)
with t in {-1, +1} and P either ||w||_1 or 0.5*||w||^2; the bias is
never penalized. Larger C means less regularization. Solved by FISTA
with a Lipschitz step size, which yields exact zeros under l1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch
from .base import FeatureMatrix, LabeledDataset


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass(frozen=True)
class LogRegParams:
    penalty: str = "l2"
    C: float = 1.0
    max_iterations: int = 2000
    tolerance: float = 1e-6

    def __post_init__(self):
        if self.penalty not in ("l1", "l2"):
            raise ValueError(f"penalty must be l1|l2, got {self.penalty!r}")
        if self.C <= 0:
            raise ValueError("C must be > 0")
        if self.max_iterations < 1 or self.tolerance <= 0:
            raise ValueError("invalid optimizer controls")


def log_loss_and_grad(
    w: np.ndarray, b: float, X: np.ndarray, y01: np.ndarray
) -> tuple[float, np.ndarray, float]:
    """Mean log-loss and its analytic gradient (no penalty term)."""
    n = X.shape[0]
    z = X @ w + b
    t = 2.0 * y01 - 1.0
    margins = t * z
    # numerically stable log(1 + exp(-m))
    loss = float(np.mean(np.logaddexp(0.0, -margins)))
    residual = sigmoid(z) - y01
    grad_w = X.T @ residual / n
    grad_b = float(residual.mean())
    return loss, grad_w, grad_b


class LogisticRegression:
    def __init__(self, params: LogRegParams):
        self.params = params
        self.w: np.ndarray = None
        self.b: float = 0.0
        self.d = 0
        self.converged = False
        self.iterations = 0

    def _penalty(self, w: np.ndarray, lam: float) -> float:
        if self.params.penalty == "l1":
            return lam * float(np.abs(w).sum())
        return 0.5 * lam * float(w @ w)

    def objective(self, w: np.ndarray, b: float, X: np.ndarray, y01: np.ndarray) -> float:
        lam = 1.0 / (self.params.C * X.shape[0])
        loss, _, _ = log_loss_and_grad(w, b, X, y01)
        return loss + self._penalty(w, lam)

    def fit(self, data: LabeledDataset) -> "LogisticRegression":
        data.require_both_classes()
        X = data.X.rows
        y01 = data.y.astype(np.float64)
        n, d = X.shape
        p = self.params
        lam = 1.0 / (p.C * n)

        # Lipschitz constant of the smooth part (loss + l2 penalty)
        aug = np.hstack([X, np.ones((n, 1))])
        L = float(np.linalg.norm(aug, 2)) ** 2 / (4.0 * n)
        if p.penalty == "l2":
            L += lam
        step = 1.0 / L

        w = np.zeros(d)
        b = 0.0
        wv, bv = w.copy(), b  # FISTA extrapolation point
        t_acc = 1.0
        self.converged = False
        for it in range(p.max_iterations):
            _, grad_w, grad_b = log_loss_and_grad(wv, bv, X, y01)
            if p.penalty == "l2":
                grad_w = grad_w + lam * wv
                w_new = wv - step * grad_w
            else:
                shifted = wv - step * grad_w
                w_new = np.sign(shifted) * np.maximum(np.abs(shifted) - step * lam, 0.0)
            b_new = bv - step * grad_b
            # proximal-gradient residual at the extrapolation point
            residual = max(
                float(np.max(np.abs(w_new - wv))), abs(b_new - bv)
            ) / step
            t_next = (1.0 + np.sqrt(1.0 + 4.0 * t_acc * t_acc)) / 2.0
            wv = w_new + ((t_acc - 1.0) / t_next) * (w_new - w)
            bv = b_new + ((t_acc - 1.0) / t_next) * (b_new - b)
            w, b, t_acc = w_new, b_new, t_next
            self.iterations = it + 1
            if residual < p.tolerance:
                self.converged = True
                break
        self.w = w
        self.b = float(b)
        self.d = d
        return self

    def predict_proba(self, X: FeatureMatrix) -> np.ndarray:
        if self.w is None:
            raise ValueError("model is not fitted")
        if X.d != self.d:
            raise DimensionMismatch(f"expected {self.d} features, got {X.d}")
        return sigmoid(X.rows @ self.w + self.b)

    def to_dict(self) -> dict:
        return {
            "model": "logreg",
            "params": {
                "penalty": self.params.penalty,
                "C": self.params.C,
                "max_iterations": self.params.max_iterations,
                "tolerance": self.params.tolerance,
            },
            "d": self.d,
            "w": self.w.tolist(),
            "b": self.b,
            "converged": self.converged,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LogisticRegression":
        model = cls(LogRegParams(**doc["params"]))
        model.w = np.asarray(doc["w"], dtype=np.float64)
        model.b = float(doc["b"])
        model.d = doc["d"]
        model.converged = doc.get("converged", True)
        return model


def logreg_fit(data: LabeledDataset, params: LogRegParams) -> LogisticRegression:
    return LogisticRegression(params).fit(data)
