"""Versioned, immutable (standardizer, classifier) bundles per kind."""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..graph.store import ComponentKind
from ..models import classifier_from_dict
from .standardize import Standardizer


def training_fingerprint(rows: np.ndarray) -> str:
    digest = hashlib.sha256()
    digest.update(str(rows.shape).encode())
    digest.update(np.ascontiguousarray(rows, dtype=np.float64).tobytes())
    return digest.hexdigest()[:16]


@dataclass(frozen=True)
class ModelBundle:
    kind: ComponentKind
    standardizer: Standardizer
    classifier: object
    unsupervised: str
    supervised: str
    feature_names: tuple[str, ...]
    version: int
    trained_at: float
    training_rows: int
    fingerprint: str
    flags: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "standardizer": self.standardizer.to_dict(),
            "classifier": self.classifier.to_dict(),
            "unsupervised": self.unsupervised,
            "supervised": self.supervised,
            "feature_names": list(self.feature_names),
            "version": self.version,
            "trained_at": self.trained_at,
            "training_rows": self.training_rows,
            "fingerprint": self.fingerprint,
            "flags": list(self.flags),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelBundle":
        return cls(
            kind=ComponentKind.parse(doc["kind"]),
            standardizer=Standardizer.from_dict(doc["standardizer"]),
            classifier=classifier_from_dict(doc["classifier"]),
            unsupervised=doc["unsupervised"],
            supervised=doc["supervised"],
            feature_names=tuple(doc["feature_names"]),
            version=doc["version"],
            trained_at=doc["trained_at"],
            training_rows=doc["training_rows"],
            fingerprint=doc["fingerprint"],
            flags=tuple(doc.get("flags", ())),
        )

    @classmethod
    def from_json(cls, text: str) -> "ModelBundle":
        return cls.from_dict(json.loads(text))


class BundleRegistry:
    """Atomic per-kind publication of immutable bundles."""

    def __init__(self):
        self._bundles: dict[ComponentKind, ModelBundle] = {}
        self._lock = threading.Lock()

    def get(self, kind: ComponentKind) -> Optional[ModelBundle]:
        with self._lock:
            return self._bundles.get(kind)

    def next_version(self, kind: ComponentKind) -> int:
        with self._lock:
            current = self._bundles.get(kind)
            return 1 if current is None else current.version + 1

    def publish(self, bundle: ModelBundle) -> None:
        with self._lock:
            current = self._bundles.get(bundle.kind)
            expected = 1 if current is None else current.version + 1
            if bundle.version != expected:
                raise ValueError(
                    f"bundle version {bundle.version} for {bundle.kind.value}, expected {expected}"
                )
            self._bundles[bundle.kind] = bundle

    def all(self) -> dict[ComponentKind, ModelBundle]:
        with self._lock:
            return dict(self._bundles)
