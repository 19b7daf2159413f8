"""Engine runtime: graph + pipeline + ingestion mode + events + scheduler."""

from __future__ import annotations

import threading
from typing import Optional

from ..config import EngineConfig, config_from_dict
from ..errors import SentinelError, UnknownTarget
from ..graph.store import ComponentKind, EdgeType, GraphStore
from ..ingest.prometheus import scrape_prometheus
from ..ingest.replay import replay_load
from ..ingest.simulator import ClusterSimulator, FaultSpec
from ..pipeline.engine import Pipeline
from ..pipeline.policy import metric_schema_from_policies
from ..pipeline.scheduler import Scheduler, WallClock
from .events import EventBus

MODES = ("live", "simulate", "replay")


class EngineRuntime:
    def __init__(
        self,
        config: EngineConfig,
        mode: str = "simulate",
        replay_file: Optional[str] = None,
    ):
        if mode not in MODES:
            raise SentinelError(f"mode must be one of {MODES}, got {mode!r}")
        if mode == "replay" and not replay_file:
            raise SentinelError("replay mode requires a replay file")
        self.mode = mode
        self.config = config
        self.events = EventBus()
        self.graph = GraphStore(metric_schema_from_policies(config.policies))
        self.pipeline = Pipeline(self.graph, config)
        self.simulator: Optional[ClusterSimulator] = None
        self.replay_file = replay_file
        self.scheduler: Optional[Scheduler] = None
        self._config_lock = threading.Lock()
        self._tick_counter = 0

        if mode == "simulate":
            self.simulator = ClusterSimulator(config.simulator)
            self.graph.load_snapshot(self.simulator.topology_snapshot())
        elif mode == "live":
            if config.live is None:
                raise SentinelError("live mode requires a [live] config section")
            if config.live.topology_snapshot:
                from ..graph.store import GraphSnapshot

                with open(config.live.topology_snapshot, "r", encoding="utf-8") as fh:
                    self.graph.load_snapshot(GraphSnapshot.from_json(fh.read()))

    # -- ticks -------------------------------------------------------------

    def graph_tick(self, now: Optional[float] = None):
        """One ingestion + scoring pass; emits exactly one score_update."""
        import time as _time

        now = _time.time() if now is None else now
        if self.mode == "simulate":
            self.pipeline.apply_metric_updates(self.simulator.tick(now), now=now)
        elif self.mode == "live":
            live = self.config.live
            values = scrape_prometheus(live.base_url, list(live.queries), at=now)
            self.pipeline.apply_metric_updates(values, now=now)
        report = self.pipeline.update_graph(now=now)
        self._publish_score_update(report)
        return report

    def _publish_score_update(self, report):
        self._tick_counter += 1
        scores: dict[str, float] = {}
        for entry in report.kinds:
            scores.update(entry.scores)
        self.events.publish(
            "score_update",
            {
                "at": report.at,
                "tick": self._tick_counter,
                "duration_s": report.duration_s,
                "scores": scores,
                "kinds": [
                    {
                        "kind": entry.kind.value,
                        "scored": len(entry.scores),
                        "unscored": len(entry.unscored),
                        "mean_score": (
                            sum(entry.scores.values()) / len(entry.scores)
                            if entry.scores
                            else None
                        ),
                    }
                    for entry in report.kinds
                ],
            },
        )

    def model_tick(self, now: Optional[float] = None):
        report = self.pipeline.update_models(now=now)
        self.events.publish(
            "model_retrained",
            {
                "at": report.at,
                "results": {
                    kind.value: {
                        "status": result.status,
                        "version": result.bundle.version if result.bundle else None,
                        "error": str(result.error) if result.error else None,
                    }
                    for kind, result in report.results.items()
                },
            },
        )
        return report

    def replay_all(self):
        """Feed every recorded batch through a graph tick, then idle."""
        for batch in replay_load(self.replay_file):
            updates = {(u.id, u.metric): u.value for u in batch.updates}
            self.pipeline.apply_metric_updates(updates, now=batch.ts)
            self._publish_score_update(self.pipeline.update_graph(now=batch.ts))

    # -- scheduling ----------------------------------------------------------

    def start_scheduler(self):
        def on_error(task: str, exc: Exception):
            self.events.publish("tick_error", {"task": task, "error": str(exc)})

        self.scheduler = Scheduler(WallClock(), on_error=on_error)
        self.scheduler.add_task(
            "update_graph", self.config.update_graph_interval_s, lambda now: self.graph_tick(now)
        )
        self.scheduler.add_task(
            "update_models", self.config.update_models_interval_s, lambda now: self.model_tick(now)
        )
        self.scheduler.start_background()

    def stop(self):
        if self.scheduler is not None:
            self.scheduler.stop()

    # -- control-plane operations ---------------------------------------------

    def inject_fault(self, spec: FaultSpec) -> str:
        if self.simulator is None:
            raise SentinelError("fault injection is only available in simulate mode")
        fault_id = self.simulator.inject_fault(spec)
        self.events.publish(
            "fault_injected",
            {
                "fault_id": fault_id,
                "target_pod": spec.target_pod,
                "fault_kind": spec.fault_kind,
                "workers": spec.workers,
            },
        )
        return fault_id

    def clear_fault(self, fault_id: str) -> None:
        if self.simulator is None:
            raise SentinelError("fault injection is only available in simulate mode")
        self.simulator.clear_fault(fault_id)
        self.events.publish("fault_cleared", {"fault_id": fault_id})

    def replace_config(self, doc: dict) -> EngineConfig:
        new_config = config_from_dict(doc)  # raises ConfigError with field errors
        with self._config_lock:
            self.config = new_config
            self.graph.set_metric_schema(metric_schema_from_policies(new_config.policies))
            self.pipeline.replace_config(new_config)
        self.events.publish("config_updated", {})
        return new_config

    # -- queries ---------------------------------------------------------------

    def trace(self, node_id: str) -> dict:
        node = self.graph.get_node(node_id)  # NotFound propagates

        def doc(n):
            return {
                "id": n.id,
                "kind": n.kind.value,
                "name": n.name,
                "anomaly_score": n.anomaly_score,
                "score_source": n.score_source.value,
            }

        def first(nodes):
            return doc(nodes[0]) if nodes else None

        host = replicaset = deployment = namespace = None
        siblings = []
        if node.kind is ComponentKind.POD:
            host_nodes = self.graph.neighbors(node_id, EdgeType.RUNS_ON, "out")
            host = first(host_nodes)
            rs_nodes = self.graph.neighbors(node_id, EdgeType.MANAGES, "in")
            replicaset = first(rs_nodes)
            if rs_nodes:
                deployment = first(self.graph.neighbors(rs_nodes[0].id, EdgeType.MANAGES, "in"))
            namespace = first(
                [
                    nb
                    for nb in self.graph.neighbors(node_id, EdgeType.BELONGS_TO, "out")
                    if nb.kind is ComponentKind.NAMESPACE
                ]
            )
            if host_nodes:
                siblings = [
                    doc(nb)
                    for nb in self.graph.neighbors(host_nodes[0].id, EdgeType.RUNS_ON, "in")
                    if nb.id != node_id
                ]
        return {
            "component": doc(node),
            "host_node": host,
            "replicaset": replicaset,
            "deployment": deployment,
            "namespace": namespace,
            "siblings": siblings,
        }
