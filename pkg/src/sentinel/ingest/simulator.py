"""Deterministic cluster simulator with fault injection.

Builds a fixed topology (namespaces > deployments > replica sets >
pods > containers, pods placed round-robin on nodes) and generates
per-tick metrics as seeded Gaussian noise around configured baselines.
Node utilization is the sum of hosted pod usage plus a fixed system
baseline, exactly, so conservation is assertable every tick.

Faults reshape the target pod's stream: cpu_hog ramps pod CPU to
min(1, workers/32) of the pod limit within ramp_ticks; mem_leak grows
pod memory monotonically while active. Clearing a fault decays the
affected metrics back to baseline within recovery_ticks.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import DuplicateFault, UnknownTarget
from ..graph.store import ComponentKind, EdgeType, GraphEdge, GraphNode, GraphSnapshot, GraphStore

POD_METRICS = ("cpu_usage", "mem_usage", "net_rx", "net_tx")
NODE_METRICS = ("cpu_util", "mem_util", "pod_count")

DEFAULT_BASELINES = {
    "cpu_usage": (0.05, 0.008),
    "mem_usage": (1.0e8, 8.0e6),
    "net_rx": (1.0e5, 2.0e4),
    "net_tx": (8.0e4, 1.5e4),
}


@dataclass(frozen=True)
class SimTopologySpec:
    node_count: int = 3
    namespace_count: int = 2
    deployments_per_namespace: int = 2
    replicas_per_deployment: int = 3
    containers_per_pod: int = 1
    metric_baselines: dict = field(default_factory=lambda: dict(DEFAULT_BASELINES))
    tick_interval: float = 1.0
    rng_seed: int = 0
    # node capacity model
    cpu_capacity: float = 2.0
    mem_capacity: float = 8.0e9
    system_cpu: float = 0.1
    system_mem: float = 5.0e8
    pod_cpu_limit: float = 1.0
    mem_leak_rate: float = 2.0e8
    ramp_ticks: int = 3
    recovery_ticks: int = 3

    def __post_init__(self):
        for name in (
            "node_count",
            "namespace_count",
            "deployments_per_namespace",
            "replicas_per_deployment",
            "containers_per_pod",
        ):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        for metric, (mean, std) in self.metric_baselines.items():
            if std < 0:
                raise ValueError(f"stddev for {metric} must be >= 0")
        if self.tick_interval <= 0:
            raise ValueError("tick_interval must be > 0")


@dataclass(frozen=True)
class FaultSpec:
    fault_id: str
    target_pod: str
    fault_kind: str  # cpu_hog | mem_leak
    workers: int = 32
    started_at: float = 0.0
    duration: Optional[float] = None  # seconds; None = unbounded

    def __post_init__(self):
        if self.fault_kind not in ("cpu_hog", "mem_leak"):
            raise ValueError(f"fault_kind must be cpu_hog|mem_leak, got {self.fault_kind!r}")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def intensity(self) -> float:
        return min(1.0, self.workers / 32.0)


@dataclass
class _ActiveFault:
    spec: FaultSpec
    ticks_active: int = 0
    leaked_bytes: float = 0.0
    last_value: float = 0.0  # last faulted pod-level value of the touched metric


@dataclass
class _Recovery:
    metric: str
    residual: float
    ticks_left: int


class ClusterSimulator:
    """Owns simulated topology + metric generation; thread-safe."""

    def __init__(self, spec: SimTopologySpec):
        self.spec = spec
        self._rng = np.random.default_rng(spec.rng_seed)
        self._lock = threading.Lock()
        self._faults: dict[str, _ActiveFault] = {}
        self._recoveries: dict[str, list[_Recovery]] = {}
        self._fault_counter = 0
        self._tick_count = 0
        self._pods: list[str] = []
        self._pod_node: dict[str, str] = {}
        self._pod_containers: dict[str, list[str]] = {}
        self._node_pods: dict[str, list[str]] = {}
        self._store = GraphStore(metric_schema=default_metric_schema())
        self._build_topology()

    # -- topology ------------------------------------------------------

    def _build_topology(self):
        s = self.spec
        store = self._store
        now = 0.0
        store.upsert_node(GraphNode("cluster", ComponentKind.CLUSTER, name="cluster"), now=now)
        nodes = [f"node-{i:02d}" for i in range(s.node_count)]
        for node_id in nodes:
            store.upsert_node(GraphNode(node_id, ComponentKind.NODE, name=node_id), now=now)
            self._node_pods[node_id] = []
        pod_index = 0
        for ns_i in range(s.namespace_count):
            ns = f"ns-{ns_i:02d}"
            store.upsert_node(GraphNode(ns, ComponentKind.NAMESPACE, name=ns), now=now)
            store.add_edge(GraphEdge(ns, "cluster", EdgeType.BELONGS_TO), now=now)
            for dep_i in range(s.deployments_per_namespace):
                dep = f"{ns}/dep-{dep_i:02d}"
                store.upsert_node(GraphNode(dep, ComponentKind.DEPLOYMENT, name=dep), now=now)
                store.add_edge(GraphEdge(dep, ns, EdgeType.BELONGS_TO), now=now)
                rs = f"{dep}/rs-0"
                store.upsert_node(GraphNode(rs, ComponentKind.REPLICASET, name=rs), now=now)
                store.add_edge(GraphEdge(dep, rs, EdgeType.MANAGES), now=now)
                for rep_i in range(s.replicas_per_deployment):
                    pod = f"{dep}/pod-{rep_i:02d}"
                    store.upsert_node(GraphNode(pod, ComponentKind.POD, name=pod), now=now)
                    store.add_edge(GraphEdge(rs, pod, EdgeType.MANAGES), now=now)
                    store.add_edge(GraphEdge(pod, ns, EdgeType.BELONGS_TO), now=now)
                    node_id = nodes[pod_index % len(nodes)]
                    store.add_edge(GraphEdge(pod, node_id, EdgeType.RUNS_ON), now=now)
                    self._pods.append(pod)
                    self._pod_node[pod] = node_id
                    self._node_pods[node_id].append(pod)
                    self._pod_containers[pod] = []
                    for c_i in range(s.containers_per_pod):
                        container = f"{pod}/c{c_i}"
                        store.upsert_node(
                            GraphNode(container, ComponentKind.CONTAINER, name=container), now=now
                        )
                        store.add_edge(GraphEdge(pod, container, EdgeType.CONTAINS), now=now)
                        self._pod_containers[pod].append(container)
                    pod_index += 1

    def topology_snapshot(self) -> GraphSnapshot:
        return self._store.snapshot(now=0.0)

    @property
    def pods(self) -> list[str]:
        return list(self._pods)

    def host_of(self, pod: str) -> str:
        return self._pod_node[pod]

    # -- fault control ---------------------------------------------------

    def inject_fault(self, spec: FaultSpec) -> str:
        with self._lock:
            if spec.target_pod not in self._pod_node:
                raise UnknownTarget(f"pod {spec.target_pod!r} does not exist")
            for active in self._faults.values():
                if (
                    active.spec.target_pod == spec.target_pod
                    and active.spec.fault_kind == spec.fault_kind
                ):
                    raise DuplicateFault(
                        f"{spec.fault_kind} already active on {spec.target_pod!r}"
                    )
            fault_id = spec.fault_id
            if not fault_id:
                self._fault_counter += 1
                fault_id = f"fault-{self._fault_counter}"
                spec = FaultSpec(
                    fault_id,
                    spec.target_pod,
                    spec.fault_kind,
                    spec.workers,
                    spec.started_at,
                    spec.duration,
                )
            if fault_id in self._faults:
                raise DuplicateFault(f"fault id {fault_id!r} already active")
            self._faults[fault_id] = _ActiveFault(spec)
            return fault_id

    def clear_fault(self, fault_id: str) -> None:
        with self._lock:
            fault = self._faults.pop(fault_id, None)
            if fault is None:
                raise UnknownTarget(f"fault {fault_id!r} is not active")
            self._begin_recovery(fault)

    def _begin_recovery(self, fault: _ActiveFault):
        spec = self.spec
        metric = "cpu_usage" if fault.spec.fault_kind == "cpu_hog" else "mem_usage"
        baseline = spec.metric_baselines[metric][0]
        residual = max(0.0, fault.last_value - baseline)
        if residual > 0:
            self._recoveries.setdefault(fault.spec.target_pod, []).append(
                _Recovery(metric, residual, spec.recovery_ticks)
            )

    def active_faults(self) -> list[FaultSpec]:
        with self._lock:
            return [f.spec for f in self._faults.values()]

    # -- metric generation -------------------------------------------------

    def tick(self, now: float) -> dict[str, dict[str, float]]:
        """Generate one tick of metrics for every container, pod, node."""
        with self._lock:
            self._tick_count += 1
            spec = self.spec
            updates: dict[str, dict[str, float]] = {}
            faults_by_pod: dict[str, list[_ActiveFault]] = {}
            expired: list[str] = []
            for fid, fault in self._faults.items():
                fault.ticks_active += 1
                faults_by_pod.setdefault(fault.spec.target_pod, []).append(fault)
                if fault.spec.duration is not None:
                    if fault.ticks_active * spec.tick_interval > fault.spec.duration:
                        expired.append(fid)

            per_node_cpu: dict[str, float] = {n: 0.0 for n in self._node_pods}
            per_node_mem: dict[str, float] = {n: 0.0 for n in self._node_pods}

            for pod in self._pods:
                containers = self._pod_containers[pod]
                c = len(containers)
                draws: dict[str, np.ndarray] = {}
                for metric in POD_METRICS:
                    mean, std = spec.metric_baselines.get(metric, (0.0, 0.0))
                    values = self._rng.normal(mean / c, std / np.sqrt(c), size=c)
                    draws[metric] = np.maximum(values, 0.0)

                for fault in faults_by_pod.get(pod, ()):
                    self._apply_fault(fault, draws)
                for recovery in self._recoveries.get(pod, ()):
                    self._apply_recovery(recovery, draws)
                if pod in self._recoveries:
                    self._recoveries[pod] = [
                        r for r in self._recoveries[pod] if r.ticks_left > 0
                    ]
                    if not self._recoveries[pod]:
                        del self._recoveries[pod]

                for i, container in enumerate(containers):
                    updates[container] = {m: float(draws[m][i]) for m in POD_METRICS}
                pod_values = {m: float(draws[m].sum()) for m in POD_METRICS}
                updates[pod] = pod_values
                node_id = self._pod_node[pod]
                per_node_cpu[node_id] += pod_values["cpu_usage"]
                per_node_mem[node_id] += pod_values["mem_usage"]

            for node_id, pods in self._node_pods.items():
                updates[node_id] = {
                    "cpu_util": (spec.system_cpu + per_node_cpu[node_id]) / spec.cpu_capacity,
                    "mem_util": (spec.system_mem + per_node_mem[node_id]) / spec.mem_capacity,
                    "pod_count": float(len(pods)),
                }

            for fid in expired:
                fault = self._faults.pop(fid)
                self._begin_recovery(fault)
            return updates

    def _apply_fault(self, fault: _ActiveFault, draws: dict[str, np.ndarray]):
        spec = self.spec
        fs = fault.spec
        if fs.fault_kind == "cpu_hog":
            ramp = min(1.0, fault.ticks_active / spec.ramp_ticks)
            target = min(
                spec.pod_cpu_limit,
                max(float(draws["cpu_usage"].sum()), ramp * fs.intensity * spec.pod_cpu_limit),
            )
            _retarget(draws["cpu_usage"], target)
            fault.last_value = target
        else:
            fault.leaked_bytes += spec.mem_leak_rate * fs.intensity
            floor = float(draws["mem_usage"].sum()) + fault.leaked_bytes
            target = max(fault.last_value, floor)
            _retarget(draws["mem_usage"], target)
            fault.last_value = target

    def _apply_recovery(self, recovery: _Recovery, draws: dict[str, np.ndarray]):
        recovery.ticks_left -= 1
        fraction = recovery.ticks_left / self.spec.recovery_ticks
        extra = recovery.residual * fraction
        if extra > 0:
            _retarget(draws[recovery.metric], float(draws[recovery.metric].sum()) + extra)


def _retarget(values: np.ndarray, target: float):
    """Adjust container draws so their sum equals target, surplus on c0."""
    values[0] = max(0.0, values[0] + (target - values.sum()))


def sim_init(spec: SimTopologySpec) -> GraphSnapshot:
    return ClusterSimulator(spec).topology_snapshot()


def default_metric_schema() -> dict[ComponentKind, set[str]]:
    return {
        ComponentKind.CONTAINER: set(POD_METRICS),
        ComponentKind.POD: set(POD_METRICS),
        ComponentKind.NODE: set(NODE_METRICS),
        ComponentKind.CLUSTER: set(),
        ComponentKind.NAMESPACE: set(),
        ComponentKind.DEPLOYMENT: set(),
        ComponentKind.REPLICASET: set(),
        ComponentKind.STATEFULSET: set(),
        ComponentKind.SERVICE: set(),
        ComponentKind.PORT: set(),
        ComponentKind.LABEL: set(),
    }
