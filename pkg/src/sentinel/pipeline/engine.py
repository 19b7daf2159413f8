"""The two scheduled pipeline functions: update_graph and update_models.

update_graph walks kinds bottom-up: modeled kinds get features
extracted, appended to their observation store, standardized and
scored by the published bundle; aggregator kinds average the scores
collected over their declared edges. All score writes for a tick land
atomically. update_models retrains per kind from the full observation
store: standardize, label with the unsupervised model, inject
synthetic outliers if the labeling found nothing, fit the supervised
classifier, publish a new immutable bundle.
"""

from __future__ import annotations

import threading
import time
import zlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import (
    InsufficientData,
    MissingBundle,
    NoNodes,
    SingleClass,
)
from ..graph.store import ComponentKind, GraphStore, ScoreSource
from ..models import (
    AnomalyLabeling,
    DbscanParams,
    DecisionTreeParams,
    FeatureMatrix,
    IsolationForestParams,
    LabeledDataset,
    LogRegParams,
    OcsvmParams,
    SvmParams,
    dbscan_label,
    dtree_fit,
    iforest_fit,
    logreg_fit,
    ocsvm_fit,
    svm_fit,
)
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from ..config import EngineConfig

from .bundles import BundleRegistry, ModelBundle, training_fingerprint
from .observations import ObservationStore
from .outliers import inject_synthetic_outliers
from .policy import KindPolicy, evaluation_order
from .standardize import Standardizer


@dataclass
class FeatureExtraction:
    node_ids: list[str]
    X: Optional[FeatureMatrix]
    excluded: list[tuple[str, str]] = field(default_factory=list)
    zero_neighbor: list[tuple[str, str]] = field(default_factory=list)


def extract_features(
    graph: GraphStore, kind: ComponentKind, policy: KindPolicy
) -> FeatureExtraction:
    if policy.mode != "modeled":
        raise ValueError(f"kind {kind.value} is not modeled")
    nodes = graph.nodes_of_kind(kind)
    if not nodes:
        raise NoNodes(f"no live nodes of kind {kind.value}")
    ids: list[str] = []
    rows: list[list[float]] = []
    excluded: list[tuple[str, str]] = []
    zero_neighbor: list[tuple[str, str]] = []
    for node in nodes:
        row: list[float] = []
        missing = None
        for metric in policy.features:
            if metric not in node.metrics:
                missing = metric
                break
            row.append(node.metrics[metric])
        if missing is not None:
            excluded.append((node.id, missing))
            continue
        for nf in policy.neighbor_features:
            values = [
                nb.metrics[nf.metric]
                for nb in graph.neighbors(node.id, nf.edge_type, nf.direction)
                if nf.metric in nb.metrics
            ]
            if not values:
                zero_neighbor.append((node.id, nf.name))
                row.append(0.0)
            elif nf.aggregation == "mean":
                row.append(float(np.mean(values)))
            elif nf.aggregation == "max":
                row.append(float(np.max(values)))
            else:
                row.append(float(np.sum(values)))
        ids.append(node.id)
        rows.append(row)
    X = FeatureMatrix(np.asarray(rows), policy.feature_names) if rows else None
    return FeatureExtraction(ids, X, excluded, zero_neighbor)


@dataclass
class KindTickReport:
    kind: ComponentKind
    mode: str
    order_index: int
    scores: dict[str, float] = field(default_factory=dict)
    unscored: list[str] = field(default_factory=list)
    issues: list[str] = field(default_factory=list)


@dataclass
class TickReport:
    at: float
    kinds: list[KindTickReport] = field(default_factory=list)
    duration_s: float = 0.0

    def for_kind(self, kind: ComponentKind) -> Optional[KindTickReport]:
        for entry in self.kinds:
            if entry.kind == kind:
                return entry
        return None

    def score_of(self, node_id: str) -> Optional[float]:
        for entry in self.kinds:
            if node_id in entry.scores:
                return entry.scores[node_id]
        return None


@dataclass
class ModelUpdateResult:
    kind: ComponentKind
    status: str  # published | insufficient | error
    bundle: Optional[ModelBundle] = None
    error: Optional[Exception] = None


@dataclass
class ModelUpdateReport:
    at: float
    results: dict[ComponentKind, ModelUpdateResult] = field(default_factory=dict)

    @property
    def published(self) -> list[ComponentKind]:
        return [k for k, r in self.results.items() if r.status == "published"]


def _kind_seed(base: int, kind: ComponentKind) -> int:
    return (base * 1_000_003 + zlib.crc32(kind.value.encode())) % (2**31)


class Pipeline:
    """Owns the observation stores and bundle registry for one graph."""

    def __init__(self, graph: GraphStore, config: EngineConfig):
        self.graph = graph
        self.config = config
        self.registry = BundleRegistry()
        self.stores: dict[ComponentKind, ObservationStore] = {}
        self.graph_tick_lock = threading.Lock()
        self.model_tick_lock = threading.Lock()

    # -- configuration ---------------------------------------------------

    def replace_config(self, config: EngineConfig) -> None:
        self.config = config

    def evaluation_order(self) -> list[ComponentKind]:
        if self.config.evaluation_order_override is not None:
            return list(self.config.evaluation_order_override)
        return evaluation_order(self.config.policies)

    def modeled_kinds(self) -> list[ComponentKind]:
        return [
            k for k in self.evaluation_order() if self.config.policies[k].mode == "modeled"
        ]

    def _store_for(self, kind: ComponentKind, policy: KindPolicy) -> ObservationStore:
        store = self.stores.get(kind)
        names = policy.feature_names
        if (
            store is None
            or store.feature_names != names
            or store.capacity != self.config.max_observations
        ):
            store = ObservationStore(self.config.max_observations, names)
            self.stores[kind] = store
        return store

    # -- update_graph ------------------------------------------------------

    def update_graph(
        self,
        now: Optional[float] = None,
        eager_train: bool = True,
        strict: bool = False,
    ) -> TickReport:
        with self.graph_tick_lock:
            started = time.perf_counter()
            now = time.time() if now is None else now
            report = TickReport(at=now)
            staged: dict[str, tuple[float, ScoreSource]] = {}
            for index, kind in enumerate(self.evaluation_order()):
                policy = self.config.policies[kind]
                entry = KindTickReport(kind=kind, mode=policy.mode, order_index=index)
                report.kinds.append(entry)
                if policy.mode == "modeled":
                    self._tick_modeled(kind, policy, now, staged, entry, eager_train, strict)
                else:
                    self._tick_aggregator(kind, policy, staged, entry)
            with self.graph.batch():
                for node_id, (score, source) in staged.items():
                    self.graph.set_anomaly_score(node_id, score, source, now=now)
            report.duration_s = time.perf_counter() - started
            return report

    def _tick_modeled(self, kind, policy, now, staged, entry, eager_train, strict):
        try:
            extraction = extract_features(self.graph, kind, policy)
        except NoNodes as exc:
            entry.issues.append(str(exc))
            return
        for node_id, metric in extraction.excluded:
            entry.issues.append(f"{node_id}: missing metric {metric}")
            entry.unscored.append(node_id)
        if extraction.X is None:
            return
        store = self._store_for(kind, policy)
        store.extend(now, extraction.node_ids, extraction.X.rows)
        bundle = self.registry.get(kind)
        if bundle is None and eager_train and len(store) >= self.config.min_training_rows:
            self.update_models(now, kinds=[kind])
            bundle = self.registry.get(kind)
        if bundle is None:
            if strict:
                raise MissingBundle(kind)
            entry.issues.append(f"no model bundle published for {kind.value}")
            entry.unscored.extend(extraction.node_ids)
            return
        if bundle.feature_names != extraction.X.feature_names:
            entry.issues.append(f"bundle features stale for {kind.value}")
            entry.unscored.extend(extraction.node_ids)
            return
        Z = bundle.standardizer.transform(extraction.X.rows)
        probs = bundle.classifier.predict_proba(FeatureMatrix(Z, bundle.feature_names))
        probs = np.clip(probs, 0.0, 1.0)
        for node_id, prob in zip(extraction.node_ids, probs):
            staged[node_id] = (float(prob), ScoreSource.MODEL)
            entry.scores[node_id] = float(prob)

    def _tick_aggregator(self, kind, policy, staged, entry):
        for node in self.graph.nodes_of_kind(kind):
            neighbor_ids: set[str] = set()
            for edge in policy.aggregate_edges:
                neighbor_ids.update(
                    nb.id for nb in self.graph.neighbors(node.id, edge.edge_type, edge.direction)
                )
            collected: list[float] = []
            for nid in sorted(neighbor_ids):
                if nid in staged:
                    collected.append(staged[nid][0])
                else:
                    try:
                        score = self.graph.get_node(nid).anomaly_score
                    except Exception:  # noqa: BLE001 - node vanished mid-tick
                        continue
                    if score is not None:
                        collected.append(score)
            if collected:
                value = float(np.mean(collected))
                staged[node.id] = (value, ScoreSource.AGGREGATE)
                entry.scores[node.id] = value
            else:
                entry.unscored.append(node.id)

    # -- update_models -----------------------------------------------------

    def update_models(
        self, now: Optional[float] = None, kinds: Optional[list[ComponentKind]] = None
    ) -> ModelUpdateReport:
        with self.model_tick_lock:
            now = time.time() if now is None else now
            report = ModelUpdateReport(at=now)
            targets = kinds if kinds is not None else self.modeled_kinds()
            for kind in targets:
                policy = self.config.policies.get(kind)
                if policy is None or policy.mode != "modeled":
                    continue
                report.results[kind] = self._retrain_kind(kind, policy, now)
            return report

    def _retrain_kind(self, kind: ComponentKind, policy: KindPolicy, now: float) -> ModelUpdateResult:
        store = self._store_for(kind, policy)
        have = len(store)
        need = self.config.min_training_rows
        if have < need:
            return ModelUpdateResult(kind, "insufficient", error=InsufficientData(kind, have, need))
        try:
            raw = store.matrix()
            names = store.feature_names
            standardizer = Standardizer.fit(raw)
            Z = FeatureMatrix(standardizer.transform(raw), names)
            seed = _kind_seed(self.config.rng_seed, kind)
            labeling = self._run_labeler(policy, Z, seed)
            flags: list[str] = []
            if labeling.degenerate:
                flags.append("degenerate_labeling")
            if labeling.n_anomalies < self.config.outliers.min_anomalies:
                rng = np.random.default_rng(seed + 1)
                dataset = inject_synthetic_outliers(Z, labeling.labels, self.config.outliers, rng)
                flags.append("synthetic_outliers")
            elif labeling.labels.all():
                raise SingleClass(
                    f"unsupervised labeler marked every {kind.value} observation anomalous"
                )
            else:
                dataset = LabeledDataset(Z, labeling.labels)
            classifier = self._fit_classifier(policy, dataset, seed)
            if getattr(classifier, "calibration_degenerate", False):
                flags.append("calibration_degenerate")
            if not getattr(classifier, "converged", True):
                flags.append("non_convergence")
            bundle = ModelBundle(
                kind=kind,
                standardizer=standardizer,
                classifier=classifier,
                unsupervised=policy.unsupervised,
                supervised=policy.supervised,
                feature_names=names,
                version=self.registry.next_version(kind),
                trained_at=now,
                training_rows=have,
                fingerprint=training_fingerprint(raw),
                flags=tuple(flags),
            )
            self.registry.publish(bundle)
            return ModelUpdateResult(kind, "published", bundle=bundle)
        except Exception as exc:  # noqa: BLE001 - a failed kind keeps its old bundle
            return ModelUpdateResult(kind, "error", error=exc)

    def _run_labeler(self, policy: KindPolicy, Z: FeatureMatrix, seed: int) -> AnomalyLabeling:
        params = dict(policy.unsupervised_params)
        if policy.unsupervised == "iforest":
            params.setdefault("rng_seed", seed)
            model = iforest_fit(Z, IsolationForestParams(**params))
            return model.label(Z)
        if policy.unsupervised == "dbscan":
            return dbscan_label(Z, DbscanParams(**params))
        if policy.unsupervised == "ocsvm":
            params.setdefault("rng_seed", seed)
            model = ocsvm_fit(Z, OcsvmParams(**params))
            return model.label(Z)
        raise ValueError(f"unknown unsupervised model {policy.unsupervised!r}")

    def _fit_classifier(self, policy: KindPolicy, dataset: LabeledDataset, seed: int):
        params = dict(policy.supervised_params)
        if policy.supervised == "dtree":
            params.setdefault("rng_seed", seed)
            return dtree_fit(dataset, DecisionTreeParams(**params))
        if policy.supervised == "logreg":
            return logreg_fit(dataset, LogRegParams(**params))
        if policy.supervised == "svm":
            params.setdefault("rng_seed", seed)
            return svm_fit(dataset, SvmParams(**params))
        raise ValueError(f"unknown supervised model {policy.supervised!r}")

    # -- ingestion ---------------------------------------------------------

    def apply_metric_updates(self, updates, now: Optional[float] = None) -> int:
        """Merge metric values into existing graph nodes.

        Accepts {node_id: {metric: value}} or {(node_id, metric): value}.
        Unknown node ids are skipped; returns the number of nodes touched.
        """
        now = time.time() if now is None else now
        per_node: dict[str, dict[str, float]] = {}
        if updates and isinstance(next(iter(updates)), tuple):
            for (node_id, metric), value in updates.items():
                per_node.setdefault(node_id, {})[metric] = value
        else:
            per_node = updates
        touched = 0
        with self.graph.batch():
            for node_id, metrics in per_node.items():
                if not self.graph.has_node(node_id):
                    continue
                node = self.graph.get_node(node_id)
                node.metrics.update({k: float(v) for k, v in metrics.items()})
                self.graph.upsert_node(node, now=now)
                touched += 1
        return touched
