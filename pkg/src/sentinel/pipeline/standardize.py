"""Feature standardization fitted on training observations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    sigma: np.ndarray  # raw per-feature std; zero for constant features
    scale: np.ndarray  # guarded: 1.0 where sigma == 0

    @classmethod
    def fit(cls, rows: np.ndarray) -> "Standardizer":
        rows = np.asarray(rows, dtype=np.float64)
        mean = rows.mean(axis=0)
        sigma = rows.std(axis=0)
        scale = np.where(sigma > 0.0, sigma, 1.0)
        return cls(mean=mean, sigma=sigma, scale=scale)

    def transform(self, rows: np.ndarray) -> np.ndarray:
        return (np.asarray(rows, dtype=np.float64) - self.mean) / self.scale

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "sigma": self.sigma.tolist(),
            "scale": self.scale.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Standardizer":
        return cls(
            mean=np.asarray(doc["mean"], dtype=np.float64),
            sigma=np.asarray(doc["sigma"], dtype=np.float64),
            scale=np.asarray(doc["scale"], dtype=np.float64),
        )
