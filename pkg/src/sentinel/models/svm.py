"""Soft-margin SVM solved in the dual by SMO, with Platt calibration.

Pairwise coordinate updates on the dual variables until a full sweep
produces no KKT violation beyond the tolerance, repeated for
``max_passes`` violation-free sweeps. Probabilities come from a 1-D
logistic fit on decision values over a held-out calibration split;
when that split cannot hold both classes the model falls back to a
fixed unit sigmoid slope and flags itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DimensionMismatch
from .base import FeatureMatrix, LabeledDataset
from .logreg import sigmoid


@dataclass(frozen=True)
class SvmParams:
    kernel: str = "rbf"
    C: float = 1.0
    gamma: float = 1.0
    smo_tolerance: float = 1e-3
    max_passes: int = 5
    max_sweeps: int = 2000
    calibration_fraction: float = 0.2
    rng_seed: int = 0

    def __post_init__(self):
        if self.kernel not in ("linear", "rbf"):
            raise ValueError(f"kernel must be linear|rbf, got {self.kernel!r}")
        if self.C <= 0 or self.gamma <= 0:
            raise ValueError("C and gamma must be > 0")
        if self.smo_tolerance <= 0 or self.max_passes < 1:
            raise ValueError("invalid solver controls")


def kernel_matrix(A: np.ndarray, B: np.ndarray, kernel: str, gamma: float) -> np.ndarray:
    if kernel == "linear":
        return A @ B.T
    sq = (
        np.sum(A * A, axis=1)[:, None]
        - 2.0 * (A @ B.T)
        + np.sum(B * B, axis=1)[None, :]
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


class SupportVectorMachine:
    def __init__(self, params: SvmParams):
        self.params = params
        self.X_train: np.ndarray = None
        self.t_train: np.ndarray = None  # +/- 1
        self.alpha: np.ndarray = None
        self.b: float = 0.0
        self.d = 0
        self.converged = False
        self.calibration_degenerate = False
        self.platt_a = 1.0
        self.platt_b = 0.0

    # -- dual solver ---------------------------------------------------

    def _smo(self, K: np.ndarray, t: np.ndarray, rng) -> tuple[np.ndarray, float, bool]:
        p = self.params
        n = t.shape[0]
        C = p.C
        tol = p.smo_tolerance
        alpha = np.zeros(n)
        b = 0.0
        F = np.full(n, b)  # cached decision values K @ (alpha*t) + b
        passes = 0
        sweeps = 0
        def attempt(i: int, j: int) -> bool:
            nonlocal b
            Ei = F[i] - t[i]
            Ej = F[j] - t[j]
            ai_old, aj_old = alpha[i], alpha[j]
            if t[i] == t[j]:
                lo, hi = max(0.0, ai_old + aj_old - C), min(C, ai_old + aj_old)
            else:
                lo, hi = max(0.0, aj_old - ai_old), min(C, C + aj_old - ai_old)
            if lo >= hi:
                return False
            eta = 2.0 * K[i, j] - K[i, i] - K[j, j]
            if eta >= 0:
                return False
            aj = aj_old - t[j] * (Ei - Ej) / eta
            aj = min(max(aj, lo), hi)
            if abs(aj - aj_old) < 1e-12:
                return False
            ai = ai_old + t[i] * t[j] * (aj_old - aj)
            b1 = b - Ei - t[i] * (ai - ai_old) * K[i, i] - t[j] * (aj - aj_old) * K[i, j]
            b2 = b - Ej - t[i] * (ai - ai_old) * K[i, j] - t[j] * (aj - aj_old) * K[j, j]
            if 0.0 < ai < C:
                b_new = b1
            elif 0.0 < aj < C:
                b_new = b2
            else:
                b_new = (b1 + b2) / 2.0
            F[:] += (
                t[i] * (ai - ai_old) * K[:, i]
                + t[j] * (aj - aj_old) * K[:, j]
                + (b_new - b)
            )
            alpha[i], alpha[j] = ai, aj
            b = b_new
            return True

        while passes < p.max_passes and sweeps < p.max_sweeps:
            violations = 0
            for i in range(n):
                Ei = F[i] - t[i]
                r = t[i] * Ei
                if not ((r < -tol and alpha[i] < C) or (r > tol and alpha[i] > 0)):
                    continue
                violations += 1
                # second-choice heuristic: largest |Ei - Ej| first, then scan
                errors = np.abs(Ei - (F - t))
                errors[i] = -1.0
                if attempt(i, int(errors.argmax())):
                    continue
                for tried, j in enumerate(rng.permutation(n)):
                    if tried > 40:
                        break
                    if j != i and attempt(i, int(j)):
                        break
            sweeps += 1
            passes = passes + 1 if violations == 0 else 0
        return alpha, b, passes >= p.max_passes

    def fit(self, data: LabeledDataset) -> "SupportVectorMachine":
        data.require_both_classes()
        p = self.params
        rng = np.random.default_rng(p.rng_seed)
        X = data.X.rows
        t = np.where(data.y, 1.0, -1.0)
        n = X.shape[0]

        cal_idx = _stratified_holdout(data.y, p.calibration_fraction, rng)
        train_idx = np.setdiff1d(np.arange(n), cal_idx)
        y_cal = data.y[cal_idx]
        if cal_idx.size == 0 or y_cal.all() or not y_cal.any() or _single_class(data.y[train_idx]):
            train_idx = np.arange(n)
            cal_idx = np.empty(0, dtype=np.int64)

        Xt, tt = X[train_idx], t[train_idx]
        K = kernel_matrix(Xt, Xt, p.kernel, p.gamma)
        alpha, b, clean_sweeps = self._smo(K, tt, rng)
        interior = (alpha > 1e-9) & (alpha < p.C - 1e-9)
        if interior.any():
            # recentre the bias on the interior support vectors
            b = float(np.mean(tt[interior] - (K[interior] @ (alpha * tt))))
        self.X_train, self.t_train = Xt, tt
        self.alpha, self.b = alpha, float(b)
        self.d = X.shape[1]
        self.converged = clean_sweeps or self.kkt_violation() <= p.smo_tolerance

        if cal_idx.size:
            f_cal = self.decision(FeatureMatrix(X[cal_idx], data.X.feature_names))
            self._fit_platt(f_cal, data.y[cal_idx])
        else:
            self.calibration_degenerate = True
            self.platt_a, self.platt_b = 1.0, 0.0
        return self

    def _fit_platt(self, f: np.ndarray, y: np.ndarray):
        from .logreg import LogisticRegression, LogRegParams

        ds = LabeledDataset(FeatureMatrix(f[:, None], ("decision",)), y)
        lr = LogisticRegression(LogRegParams(penalty="l2", C=1e6, max_iterations=5000)).fit(ds)
        self.platt_a = float(lr.w[0])
        self.platt_b = float(lr.b)
        self.calibration_degenerate = False

    # -- inference -----------------------------------------------------

    def decision(self, X: FeatureMatrix) -> np.ndarray:
        if self.alpha is None:
            raise ValueError("model is not fitted")
        if X.d != self.d:
            raise DimensionMismatch(f"expected {self.d} features, got {X.d}")
        sv = self.alpha > 1e-12
        if not sv.any():
            return np.full(X.n, self.b)
        Ksv = kernel_matrix(X.rows, self.X_train[sv], self.params.kernel, self.params.gamma)
        return Ksv @ (self.alpha[sv] * self.t_train[sv]) + self.b

    def predict_proba(self, X: FeatureMatrix) -> np.ndarray:
        return sigmoid(self.platt_a * self.decision(X) + self.platt_b)

    # -- diagnostics ---------------------------------------------------

    def dual_objective(self) -> float:
        coef = self.alpha * self.t_train
        K = kernel_matrix(self.X_train, self.X_train, self.params.kernel, self.params.gamma)
        return float(self.alpha.sum() - 0.5 * coef @ K @ coef)

    def kkt_violation(self) -> float:
        """Max violation of the KKT conditions over training points."""
        f = kernel_matrix(
            self.X_train, self.X_train, self.params.kernel, self.params.gamma
        ) @ (self.alpha * self.t_train) + self.b
        margins = self.t_train * f
        C = self.params.C
        worst = 0.0
        for i in range(self.alpha.shape[0]):
            a = self.alpha[i]
            if a < 1e-9:
                worst = max(worst, 1.0 - margins[i])
            elif a > C - 1e-9:
                worst = max(worst, margins[i] - 1.0)
            else:
                worst = max(worst, abs(margins[i] - 1.0))
        return float(worst)

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        sv = self.alpha > 1e-12
        return {
            "model": "svm",
            "params": {
                "kernel": self.params.kernel,
                "C": self.params.C,
                "gamma": self.params.gamma,
                "smo_tolerance": self.params.smo_tolerance,
                "max_passes": self.params.max_passes,
                "max_sweeps": self.params.max_sweeps,
                "calibration_fraction": self.params.calibration_fraction,
                "rng_seed": self.params.rng_seed,
            },
            "d": self.d,
            "support_vectors": self.X_train[sv].tolist(),
            "support_targets": self.t_train[sv].tolist(),
            "alpha": self.alpha[sv].tolist(),
            "b": self.b,
            "platt_a": self.platt_a,
            "platt_b": self.platt_b,
            "calibration_degenerate": self.calibration_degenerate,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SupportVectorMachine":
        model = cls(SvmParams(**doc["params"]))
        model.X_train = np.asarray(doc["support_vectors"], dtype=np.float64)
        if model.X_train.size == 0:
            model.X_train = model.X_train.reshape(0, doc["d"])
        model.t_train = np.asarray(doc["support_targets"], dtype=np.float64)
        model.alpha = np.asarray(doc["alpha"], dtype=np.float64)
        model.b = float(doc["b"])
        model.d = doc["d"]
        model.platt_a = float(doc["platt_a"])
        model.platt_b = float(doc["platt_b"])
        model.calibration_degenerate = doc.get("calibration_degenerate", False)
        model.converged = True
        return model


def _single_class(y: np.ndarray) -> bool:
    return bool(y.all() or not y.any())


def _stratified_holdout(y: np.ndarray, fraction: float, rng) -> np.ndarray:
    held = []
    for cls in (False, True):
        members = np.flatnonzero(y == cls)
        k = int(np.floor(fraction * members.size))
        if k > 0:
            held.append(rng.permutation(members)[:k])
    if not held:
        return np.empty(0, dtype=np.int64)
    return np.sort(np.concatenate(held))


def svm_fit(data: LabeledDataset, params: SvmParams) -> SupportVectorMachine:
    return SupportVectorMachine(params).fit(data)
