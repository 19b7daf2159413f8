"""Bounded per-kind history of feature vectors for retraining."""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Observation:
    ts: float
    node_id: str
    vector: tuple[float, ...]


class ObservationStore:
    """Ring buffer of observations for one modeled kind.

    Eviction is strictly oldest-first; capacity is the configured
    maximum number of retained observations.
    """

    def __init__(self, capacity: int, feature_names: tuple[str, ...]):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.feature_names = tuple(feature_names)
        self._buffer: deque[Observation] = deque(maxlen=capacity)
        self._lock = threading.Lock()

    def __len__(self) -> int:
        with self._lock:
            return len(self._buffer)

    def append(self, ts: float, node_id: str, vector) -> None:
        vector = tuple(float(v) for v in vector)
        if len(vector) != len(self.feature_names):
            raise ValueError(
                f"vector has {len(vector)} entries, store expects {len(self.feature_names)}"
            )
        with self._lock:
            self._buffer.append(Observation(ts, node_id, vector))

    def extend(self, ts: float, node_ids, matrix) -> None:
        for node_id, row in zip(node_ids, matrix):
            self.append(ts, node_id, row)

    def observations(self) -> list[Observation]:
        with self._lock:
            return list(self._buffer)

    def matrix(self) -> np.ndarray:
        with self._lock:
            if not self._buffer:
                return np.empty((0, len(self.feature_names)))
            return np.asarray([o.vector for o in self._buffer], dtype=np.float64)
