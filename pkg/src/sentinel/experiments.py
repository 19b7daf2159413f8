"""Scripted fault-injection scenarios: baseline, stress, removal.

Each experiment drives the simulator and pipeline through three
phases - a quiet baseline (scaled to ticks), a fault window on one
target pod, and recovery after the fault is cleared - then grades the
run: the host node must look calm before, alarmed during, calm after;
the culprit pod must dwarf its siblings; and the owning aggregates
must rise above their peers.
"""

from __future__ import annotations

import statistics
import time
from dataclasses import dataclass, replace
from typing import Optional

from .config import EngineConfig, with_seed
from .errors import SentinelError
from .graph.store import ComponentKind, EdgeType, GraphStore
from .ingest.simulator import ClusterSimulator, FaultSpec, SimTopologySpec
from .pipeline.engine import Pipeline
from .pipeline.outliers import OutlierConfig
from .pipeline.policy import default_policies, metric_schema_from_policies

EXPERIMENT_KINDS = ("cpu-hog", "mem-leak")


@dataclass(frozen=True)
class ExperimentThresholds:
    baseline_node_max: float = 0.5
    fault_node_min: float = 0.9
    culprit_ratio: float = 10.0
    culprit_floor: float = 0.5
    recovery_node_max: float = 0.5
    recovery_tick_limit: int = 5


def experiment_config(seed: int = 0) -> EngineConfig:
    """Scenario defaults: several namespaces and nodes so per-kind
    medians are meaningful, pods modeled on their own metrics (the
    shared host-node feature would smear the culprit's signal across
    innocent siblings), and enough synthetic outliers that the
    supervised stage learns an anomaly envelope in every direction."""
    policies = default_policies()
    pod_metrics = ("cpu_usage", "mem_usage", "net_rx", "net_tx")
    policies[ComponentKind.POD] = replace(
        policies[ComponentKind.POD], features=pod_metrics, neighbor_features=()
    )
    # Density labeling finds no outliers in quiet baseline noise, so the
    # anomaly class comes entirely from injected synthetics and the alarm
    # thresholds sit at the synthetic envelope instead of the noise
    # fringe (a quantile labeler would always flag the top noise draw and
    # pull thresholds into the bulk). Leaves need two training rows so no
    # single stray point can carve its own alarm box.
    for kind in (ComponentKind.CONTAINER, ComponentKind.POD, ComponentKind.NODE):
        policies[kind] = replace(
            policies[kind],
            unsupervised="dbscan",
            unsupervised_params={"eps": 3.0, "min_samples": 2},
            supervised_params={"min_samples_leaf": 2},
        )
    cfg = EngineConfig(
        outliers=OutlierConfig(
            fraction=0.02,
            sigma_shift=7.0,
            min_count=24,
            min_anomalies=8,
            shift_features="axis",
        ),
        policies=policies,
        simulator=SimTopologySpec(
            node_count=4,
            namespace_count=3,
            deployments_per_namespace=2,
            replicas_per_deployment=3,
            containers_per_pod=1,
            rng_seed=seed,
        ),
    )
    return with_seed(cfg, seed)


def run_experiment(
    kind: str,
    seed: int = 0,
    config: Optional[EngineConfig] = None,
    baseline_ticks: int = 20,
    fault_ticks: int = 10,
    recovery_tick_budget: int = 10,
    workers: int = 32,
    thresholds: ExperimentThresholds = ExperimentThresholds(),
    realtime: bool = False,
) -> dict:
    if kind not in EXPERIMENT_KINDS:
        raise SentinelError(f"unknown experiment {kind!r}; pick one of {EXPERIMENT_KINDS}")
    started = time.time()
    cfg = config if config is not None else experiment_config(seed)
    sim = ClusterSimulator(cfg.simulator)
    graph = GraphStore(metric_schema_from_policies(cfg.policies))
    graph.load_snapshot(sim.topology_snapshot())
    pipeline = Pipeline(graph, cfg)

    def tick(t: float):
        if realtime:
            time.sleep(cfg.simulator.tick_interval)
        pipeline.apply_metric_updates(sim.tick(t), now=t)
        return pipeline.update_graph(now=t, eager_train=False)

    # -- phase 1: baseline -------------------------------------------------
    t = 0.0
    for _ in range(baseline_ticks):
        t += 1.0
        tick(t)
    model_report = pipeline.update_models(now=t)
    failed = [r for r in model_report.results.values() if r.status != "published"]
    if failed:
        raise SentinelError(
            "model training failed: "
            + "; ".join(f"{r.kind.value}: {r.error}" for r in failed)
        )
    t += 1.0
    baseline_report = tick(t)

    target_pod = sim.pods[0]
    target_node = sim.host_of(target_pod)
    namespace = graph.neighbors(target_pod, EdgeType.BELONGS_TO, "out")[0].id
    replicaset = graph.neighbors(target_pod, EdgeType.MANAGES, "in")[0].id
    deployment = graph.neighbors(replicaset, EdgeType.MANAGES, "in")[0].id
    siblings = [
        nb.id for nb in graph.neighbors(target_node, EdgeType.RUNS_ON, "in")
        if nb.id != target_pod
    ]

    baseline_node_score = baseline_report.score_of(target_node)
    baseline_pod_score = baseline_report.score_of(target_pod)

    # -- phase 2: fault ------------------------------------------------------
    fault_kind = "cpu_hog" if kind == "cpu-hog" else "mem_leak"
    fault_id = sim.inject_fault(
        FaultSpec("", target_pod, fault_kind, workers=workers, started_at=t)
    )
    peak_node_score = 0.0
    fault_report = None
    for _ in range(fault_ticks):
        t += 1.0
        fault_report = tick(t)
        node_score = fault_report.score_of(target_node) or 0.0
        peak_node_score = max(peak_node_score, node_score)

    culprit_score = fault_report.score_of(target_pod) or 0.0
    sibling_scores = {s: fault_report.score_of(s) or 0.0 for s in siblings}
    sibling_median = statistics.median(sibling_scores.values()) if sibling_scores else 0.0

    def kind_scores(report, component_kind):
        entry = report.for_kind(component_kind)
        return dict(entry.scores) if entry else {}

    aggregates = {
        "namespace": fault_report.score_of(namespace),
        "replicaset": fault_report.score_of(replicaset),
        "deployment": fault_report.score_of(deployment),
    }
    kind_medians = {
        "namespace": _median(kind_scores(fault_report, ComponentKind.NAMESPACE)),
        "replicaset": _median(kind_scores(fault_report, ComponentKind.REPLICASET)),
        "deployment": _median(kind_scores(fault_report, ComponentKind.DEPLOYMENT)),
    }

    # -- phase 3: removal ----------------------------------------------------
    sim.clear_fault(fault_id)
    recovery_scores: list[float] = []
    ticks_to_calm = None
    for i in range(recovery_tick_budget):
        t += 1.0
        report = tick(t)
        node_score = report.score_of(target_node) or 0.0
        recovery_scores.append(node_score)
        if ticks_to_calm is None and node_score < thresholds.recovery_node_max:
            ticks_to_calm = i + 1

    # -- grading ---------------------------------------------------------------
    culprit_threshold = max(
        thresholds.culprit_ratio * sibling_median, thresholds.culprit_floor
    )
    checks = [
        _check("baseline_node_calm", baseline_node_score is not None
               and baseline_node_score < thresholds.baseline_node_max,
               baseline_node_score, f"< {thresholds.baseline_node_max}"),
        _check("fault_node_alarmed", peak_node_score >= thresholds.fault_node_min,
               peak_node_score, f">= {thresholds.fault_node_min}"),
        _check("culprit_dwarfs_siblings", culprit_score >= culprit_threshold,
               culprit_score, f">= {culprit_threshold:.4f}"),
        _check("aggregates_above_median", all(
            aggregates[k] is not None and aggregates[k] > kind_medians[k]
            for k in ("namespace", "replicaset", "deployment")
        ), aggregates, "> per-kind median"),
        _check("recovery_within_limit", ticks_to_calm is not None
               and ticks_to_calm <= thresholds.recovery_tick_limit,
               ticks_to_calm, f"<= {thresholds.recovery_tick_limit} ticks"),
    ]
    report = {
        "experiment": kind,
        "seed": seed,
        "generated_at": started,
        "duration_s": time.time() - started,
        "phases": {
            "baseline_ticks": baseline_ticks,
            "fault_ticks": fault_ticks,
            "recovery_tick_budget": recovery_tick_budget,
        },
        "target": {
            "pod": target_pod,
            "node": target_node,
            "namespace": namespace,
            "replicaset": replicaset,
            "deployment": deployment,
        },
        "baseline": {
            "node_score": baseline_node_score,
            "pod_score": baseline_pod_score,
        },
        "fault": {
            "peak_node_score": peak_node_score,
            "culprit_pod_score": culprit_score,
            "sibling_scores": sibling_scores,
            "sibling_median": sibling_median,
            "aggregates": aggregates,
            "kind_medians": kind_medians,
        },
        "recovery": {
            "node_scores": recovery_scores,
            "ticks_to_calm": ticks_to_calm,
        },
        "checks": checks,
        "pass": all(c["passed"] for c in checks),
    }
    return report


def _check(name: str, passed: bool, value, threshold: str) -> dict:
    return {"name": name, "passed": bool(passed), "value": value, "threshold": threshold}


def _median(scores: dict[str, float]) -> float:
    return statistics.median(scores.values()) if scores else 0.0
