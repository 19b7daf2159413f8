"""In-process heterogeneous property graph of the cluster.

Typed nodes carry monitoring metrics and an anomaly score; typed edges
carry the structural relations between components. The store enforces
referential integrity (edges never dangle), validates metric names
against a per-kind schema, and hands out immutable snapshots that
round-trip losslessly through JSON.

Concurrency contract: many concurrent readers or one writer. A whole
pipeline tick's writes are applied inside a single ``batch()`` so
readers only ever observe pre-tick or post-tick state.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from ..errors import (
    DanglingEndpoint,
    InconsistentSnapshot,
    NotFound,
    OutOfRange,
    SentinelError,
    UnknownKind,
    UnknownMetric,
)


class ComponentKind(str, Enum):
    CLUSTER = "Cluster"
    NODE = "Node"
    NAMESPACE = "Namespace"
    DEPLOYMENT = "Deployment"
    STATEFULSET = "StatefulSet"
    REPLICASET = "ReplicaSet"
    POD = "Pod"
    CONTAINER = "Container"
    SERVICE = "Service"
    PORT = "Port"
    LABEL = "Label"

    @classmethod
    def parse(cls, value: str) -> "ComponentKind":
        try:
            return cls(value)
        except ValueError:
            raise UnknownKind(f"unknown component kind {value!r}") from None


class EdgeType(str, Enum):
    RUNS_ON = "RUNS_ON"
    MANAGES = "MANAGES"
    CONTAINS = "CONTAINS"
    EXPOSES = "EXPOSES"
    SELECTS = "SELECTS"
    BELONGS_TO = "BELONGS_TO"

    @classmethod
    def parse(cls, value: str) -> "EdgeType":
        try:
            return cls(value)
        except ValueError:
            raise SentinelError(f"unknown edge type {value!r}") from None


class ScoreSource(str, Enum):
    MODEL = "model"
    AGGREGATE = "aggregate"
    NONE = "none"


@dataclass
class GraphNode:
    id: str
    kind: ComponentKind
    name: str = ""
    metrics: dict[str, float] = field(default_factory=dict)
    anomaly_score: Optional[float] = None
    score_source: ScoreSource = ScoreSource.NONE
    last_updated: float = 0.0

    def copy(self) -> "GraphNode":
        return GraphNode(
            id=self.id,
            kind=self.kind,
            name=self.name,
            metrics=dict(self.metrics),
            anomaly_score=self.anomaly_score,
            score_source=self.score_source,
            last_updated=self.last_updated,
        )


@dataclass(frozen=True)
class GraphEdge:
    src: str
    dst: str
    edge_type: EdgeType
    created_at: float = 0.0

    def key(self) -> tuple[str, str, EdgeType]:
        return (self.src, self.dst, self.edge_type)


@dataclass(frozen=True)
class GraphSnapshot:
    nodes: tuple[GraphNode, ...]
    edges: tuple[GraphEdge, ...]
    taken_at: float
    sequence: int

    def to_json(self) -> str:
        doc = {
            "taken_at": self.taken_at,
            "sequence": self.sequence,
            "nodes": [
                {
                    "id": n.id,
                    "kind": n.kind.value,
                    "name": n.name,
                    "metrics": n.metrics,
                    "anomaly_score": n.anomaly_score,
                    "score_source": n.score_source.value,
                }
                for n in self.nodes
            ],
            "edges": [
                {"src": e.src, "dst": e.dst, "edge_type": e.edge_type.value}
                for e in self.edges
            ],
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "GraphSnapshot":
        doc = json.loads(text)
        nodes = tuple(
            GraphNode(
                id=n["id"],
                kind=ComponentKind.parse(n["kind"]),
                name=n.get("name", ""),
                metrics={k: float(v) for k, v in n.get("metrics", {}).items()},
                anomaly_score=n.get("anomaly_score"),
                score_source=ScoreSource(n.get("score_source", "none")),
            )
            for n in doc["nodes"]
        )
        edges = tuple(
            GraphEdge(src=e["src"], dst=e["dst"], edge_type=EdgeType.parse(e["edge_type"]))
            for e in doc["edges"]
        )
        return cls(nodes=nodes, edges=edges, taken_at=doc["taken_at"], sequence=doc["sequence"])


class _RWLock:
    """Reader-writer lock; the write side is reentrant for its owner."""

    def __init__(self):
        self._cond = threading.Condition()
        self._readers = 0
        self._writer: Optional[int] = None
        self._write_depth = 0

    def acquire_read(self):
        me = threading.get_ident()
        with self._cond:
            if self._writer == me:
                # writer may read its own in-progress state
                self._write_depth += 1
                return
            while self._writer is not None:
                self._cond.wait()
            self._readers += 1

    def release_read(self):
        me = threading.get_ident()
        with self._cond:
            if self._writer == me:
                self._write_depth -= 1
                return
            self._readers -= 1
            if self._readers == 0:
                self._cond.notify_all()

    def acquire_write(self):
        me = threading.get_ident()
        with self._cond:
            if self._writer == me:
                self._write_depth += 1
                return
            while self._writer is not None or self._readers > 0:
                self._cond.wait()
            self._writer = me
            self._write_depth = 1

    def release_write(self):
        with self._cond:
            self._write_depth -= 1
            if self._write_depth == 0:
                self._writer = None
                self._cond.notify_all()


class _WriteGuard:
    def __init__(self, store: "GraphStore"):
        self._store = store

    def __enter__(self):
        self._store._lock.acquire_write()
        self._store._write_depth += 1
        return self

    def __exit__(self, *exc):
        store = self._store
        store._write_depth -= 1
        if store._write_depth == 0:
            # one version bump per outermost mutation batch, so a whole
            # tick advances the snapshot sequence exactly once
            if store._suppress_bump:
                store._suppress_bump = False
            else:
                store._sequence += 1
        store._lock.release_write()
        return False


class _ReadGuard:
    def __init__(self, lock: _RWLock):
        self._lock = lock

    def __enter__(self):
        self._lock.acquire_read()
        return self

    def __exit__(self, *exc):
        self._lock.release_read()
        return False


class GraphStore:
    """Heterogeneous dynamic property graph with anomaly annotations.

    ``metric_schema`` maps a ComponentKind to the set of metric names
    allowed on nodes of that kind; ``None`` disables metric validation.
    """

    def __init__(self, metric_schema: Optional[dict[ComponentKind, set[str]]] = None):
        self._nodes: dict[str, GraphNode] = {}
        self._edges: dict[tuple[str, str, EdgeType], GraphEdge] = {}
        self._out: dict[str, dict[EdgeType, set[str]]] = {}
        self._in: dict[str, dict[EdgeType, set[str]]] = {}
        self._by_kind: dict[ComponentKind, set[str]] = {}
        self._schema = metric_schema
        self._sequence = 0
        self._write_depth = 0
        self._suppress_bump = False
        self._lock = _RWLock()

    # -- locking -----------------------------------------------------

    def batch(self) -> _WriteGuard:
        """Hold the write lock across a multi-operation mutation."""
        return _WriteGuard(self)

    def set_metric_schema(self, schema: Optional[dict[ComponentKind, set[str]]]) -> None:
        with self.batch():
            self._schema = schema

    def _read(self) -> _ReadGuard:
        return _ReadGuard(self._lock)

    # -- mutation ----------------------------------------------------

    def _check_metrics(self, kind: ComponentKind, metrics: dict[str, float]):
        if self._schema is None:
            return
        allowed = self._schema.get(kind, set())
        for name in metrics:
            if name not in allowed:
                raise UnknownMetric(kind.value, name)

    def upsert_node(self, node: GraphNode, now: Optional[float] = None) -> str:
        if not isinstance(node.kind, ComponentKind):
            raise UnknownKind(f"unknown component kind {node.kind!r}")
        self._check_metrics(node.kind, node.metrics)
        ts = time.time() if now is None else now
        with self.batch():
            existing = self._nodes.get(node.id)
            if existing is None:
                stored = node.copy()
                stored.last_updated = ts
                self._nodes[node.id] = stored
                self._by_kind.setdefault(node.kind, set()).add(node.id)
            else:
                if existing.kind is not node.kind:
                    raise SentinelError(
                        f"node {node.id!r} already exists with kind {existing.kind.value}"
                    )
                existing.name = node.name or existing.name
                existing.metrics.update(node.metrics)
                if node.anomaly_score is not None:
                    _check_score(node.anomaly_score)
                    existing.anomaly_score = node.anomaly_score
                    existing.score_source = node.score_source
                existing.last_updated = ts
            return node.id

    def remove_node(self, node_id: str) -> int:
        with self.batch():
            node = self._nodes.pop(node_id, None)
            if node is None:
                return 0
            self._by_kind[node.kind].discard(node_id)
            removed = 0
            for etype, dsts in self._out.pop(node_id, {}).items():
                for dst in dsts:
                    del self._edges[(node_id, dst, etype)]
                    self._in[dst][etype].discard(node_id)
                    removed += 1
            for etype, srcs in self._in.pop(node_id, {}).items():
                for src in srcs:
                    key = (src, node_id, etype)
                    if key in self._edges:
                        del self._edges[key]
                        self._out[src][etype].discard(node_id)
                        removed += 1
            return removed

    def add_edge(self, edge: GraphEdge, now: Optional[float] = None) -> None:
        with self.batch():
            for endpoint in (edge.src, edge.dst):
                if endpoint not in self._nodes:
                    raise DanglingEndpoint(f"edge endpoint {endpoint!r} does not exist")
            key = edge.key()
            if key in self._edges:
                return
            ts = time.time() if now is None else now
            self._edges[key] = GraphEdge(edge.src, edge.dst, edge.edge_type, created_at=ts)
            self._out.setdefault(edge.src, {}).setdefault(edge.edge_type, set()).add(edge.dst)
            self._in.setdefault(edge.dst, {}).setdefault(edge.edge_type, set()).add(edge.src)

    def remove_edge(self, src: str, dst: str, edge_type: EdgeType) -> None:
        with self.batch():
            key = (src, dst, edge_type)
            if key not in self._edges:
                return
            del self._edges[key]
            self._out[src][edge_type].discard(dst)
            self._in[dst][edge_type].discard(src)

    def set_anomaly_score(
        self,
        node_id: str,
        score: float,
        source: ScoreSource = ScoreSource.MODEL,
        now: Optional[float] = None,
    ) -> None:
        _check_score(score)
        with self.batch():
            node = self._nodes.get(node_id)
            if node is None:
                raise NotFound(f"node {node_id!r} does not exist")
            node.anomaly_score = float(score)
            node.score_source = source
            node.last_updated = time.time() if now is None else now

    # -- queries -----------------------------------------------------

    def get_node(self, node_id: str) -> GraphNode:
        with self._read():
            node = self._nodes.get(node_id)
            if node is None:
                raise NotFound(f"node {node_id!r} does not exist")
            return node.copy()

    def has_node(self, node_id: str) -> bool:
        with self._read():
            return node_id in self._nodes

    def node_count(self) -> int:
        with self._read():
            return len(self._nodes)

    def edge_count(self) -> int:
        with self._read():
            return len(self._edges)

    def nodes_of_kind(self, kind: ComponentKind) -> list[GraphNode]:
        with self._read():
            ids = sorted(self._by_kind.get(kind, ()))
            return [self._nodes[i].copy() for i in ids]

    def neighbors(
        self, node_id: str, edge_type: EdgeType, direction: str = "both"
    ) -> list[GraphNode]:
        if direction not in ("in", "out", "both"):
            raise ValueError(f"direction must be in|out|both, got {direction!r}")
        with self._read():
            if node_id not in self._nodes:
                raise NotFound(f"node {node_id!r} does not exist")
            ids: set[str] = set()
            if direction in ("out", "both"):
                ids |= self._out.get(node_id, {}).get(edge_type, set())
            if direction in ("in", "both"):
                ids |= self._in.get(node_id, {}).get(edge_type, set())
            return [self._nodes[i].copy() for i in sorted(ids)]

    def edges(self) -> list[GraphEdge]:
        with self._read():
            return sorted(self._edges.values(), key=lambda e: (e.src, e.dst, e.edge_type.value))

    # -- snapshots ---------------------------------------------------

    def snapshot(self, now: Optional[float] = None) -> GraphSnapshot:
        with self._read():
            nodes = tuple(self._nodes[i].copy() for i in sorted(self._nodes))
            edges = tuple(
                self._edges[k] for k in sorted(self._edges, key=lambda k: (k[0], k[1], k[2].value))
            )
            return GraphSnapshot(
                nodes=nodes,
                edges=edges,
                taken_at=time.time() if now is None else now,
                sequence=self._sequence,
            )

    def load_snapshot(self, snapshot: GraphSnapshot) -> None:
        ids = {n.id for n in snapshot.nodes}
        for e in snapshot.edges:
            if e.src not in ids or e.dst not in ids:
                raise InconsistentSnapshot(
                    f"edge {e.src}->{e.dst} ({e.edge_type.value}) references a missing node"
                )
        with self.batch():
            self._nodes = {n.id: n.copy() for n in snapshot.nodes}
            self._edges = {}
            self._out = {}
            self._in = {}
            self._by_kind = {}
            for n in snapshot.nodes:
                self._by_kind.setdefault(n.kind, set()).add(n.id)
            for e in snapshot.edges:
                self._edges[e.key()] = e
                self._out.setdefault(e.src, {}).setdefault(e.edge_type, set()).add(e.dst)
                self._in.setdefault(e.dst, {}).setdefault(e.edge_type, set()).add(e.src)
            self._sequence = snapshot.sequence
            self._suppress_bump = True  # restored graph keeps its sequence


def _check_score(score: float) -> None:
    if not (0.0 <= score <= 1.0):
        raise OutOfRange(f"anomaly score {score} outside [0, 1]")
