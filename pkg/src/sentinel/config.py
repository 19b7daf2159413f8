"""Engine configuration: TOML file loading, JSON round-trip, validation.

Sections: [pipeline] scheduling and retention, [outliers] synthetic
outlier injection, [kinds.<Kind>] per-kind policies with nested
hyperparameter tables, [simulator] topology for simulate mode, and
[live] Prometheus access for live mode. Omitting [kinds] entirely
selects the default policy set.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError, CyclicPolicy
from .graph.store import ComponentKind
from .ingest.prometheus import MetricQuerySpec
from .ingest.simulator import SimTopologySpec
from .models import (
    DbscanParams,
    DecisionTreeParams,
    IsolationForestParams,
    LogRegParams,
    OcsvmParams,
    SvmParams,
)
from .pipeline.outliers import OutlierConfig
from .pipeline.policy import (
    AggregateEdge,
    KindPolicy,
    NeighborFeature,
    default_policies,
    evaluation_order,
)

UNSUPERVISED_PARAM_TYPES = {
    "iforest": IsolationForestParams,
    "dbscan": DbscanParams,
    "ocsvm": OcsvmParams,
}
SUPERVISED_PARAM_TYPES = {
    "dtree": DecisionTreeParams,
    "logreg": LogRegParams,
    "svm": SvmParams,
}


@dataclass(frozen=True)
class LiveConfig:
    base_url: str
    topology_snapshot: str = ""
    queries: tuple[MetricQuerySpec, ...] = ()


@dataclass(frozen=True)
class EngineConfig:
    update_graph_interval_s: float = 5.0
    update_models_interval_s: float = 60.0
    max_observations: int = 10000
    min_training_rows: int = 30
    rng_seed: int = 0
    outliers: OutlierConfig = field(default_factory=OutlierConfig)
    policies: dict[ComponentKind, KindPolicy] = field(default_factory=default_policies)
    evaluation_order_override: Optional[tuple[ComponentKind, ...]] = None
    simulator: SimTopologySpec = field(default_factory=SimTopologySpec)
    live: Optional[LiveConfig] = None

    def validate(self) -> list[tuple[str, str]]:
        errors: list[tuple[str, str]] = []
        if self.update_graph_interval_s <= 0:
            errors.append(("pipeline.update_graph_interval_s", "must be > 0"))
        if self.update_models_interval_s <= 0:
            errors.append(("pipeline.update_models_interval_s", "must be > 0"))
        if self.max_observations < 1:
            errors.append(("pipeline.max_observations", "must be >= 1"))
        if self.min_training_rows < 2:
            errors.append(("pipeline.min_training_rows", "must be >= 2"))
        try:
            derived = evaluation_order(self.policies)
            if self.evaluation_order_override is not None:
                override = self.evaluation_order_override
                if set(override) != set(self.policies):
                    errors.append(
                        ("pipeline.evaluation_order", "must list every configured kind exactly once")
                    )
                else:
                    position = {k: i for i, k in enumerate(override)}
                    from .pipeline.policy import EDGE_KIND_MAP, aggregation_sources

                    for kind, policy in self.policies.items():
                        if policy.mode != "aggregator":
                            continue
                        for source in aggregation_sources(policy, EDGE_KIND_MAP):
                            if source in position and position[source] > position[kind]:
                                errors.append(
                                    (
                                        "pipeline.evaluation_order",
                                        f"{kind.value} aggregates {source.value} but precedes it",
                                    )
                                )
            del derived
        except CyclicPolicy as exc:
            errors.append(("kinds", str(exc)))
        if self.live is not None:
            seen: set[tuple[ComponentKind, str]] = set()
            for query in self.live.queries:
                key = (query.kind, query.metric_name)
                if key in seen:
                    errors.append(
                        ("live.queries",
                         f"duplicate metric {query.metric_name!r} for kind {query.kind.value}")
                    )
                seen.add(key)
        for kind, policy in self.policies.items():
            prefix = f"kinds.{kind.value}"
            if policy.mode != "modeled":
                continue
            if policy.unsupervised not in UNSUPERVISED_PARAM_TYPES:
                errors.append((f"{prefix}.unsupervised", f"unknown model {policy.unsupervised!r}"))
            else:
                try:
                    UNSUPERVISED_PARAM_TYPES[policy.unsupervised](**policy.unsupervised_params)
                except (TypeError, ValueError) as exc:
                    errors.append((f"{prefix}.unsupervised_params", str(exc)))
            if policy.supervised not in SUPERVISED_PARAM_TYPES:
                errors.append((f"{prefix}.supervised", f"unknown model {policy.supervised!r}"))
            else:
                try:
                    SUPERVISED_PARAM_TYPES[policy.supervised](**policy.supervised_params)
                except (TypeError, ValueError) as exc:
                    errors.append((f"{prefix}.supervised_params", str(exc)))
        return errors

    def require_valid(self) -> "EngineConfig":
        errors = self.validate()
        if errors:
            raise ConfigError(errors)
        return self


# -- dict (JSON) round-trip ---------------------------------------------


def policy_to_dict(policy: KindPolicy) -> dict:
    return {
        "mode": policy.mode,
        "features": list(policy.features),
        "neighbor_features": [
            f"{nf.edge_type.value}:{nf.direction}:{nf.metric}:{nf.aggregation}"
            for nf in policy.neighbor_features
        ],
        "aggregate_edges": [
            f"{ae.edge_type.value}:{ae.direction}" for ae in policy.aggregate_edges
        ],
        "unsupervised": policy.unsupervised,
        "supervised": policy.supervised,
        "unsupervised_params": dict(policy.unsupervised_params),
        "supervised_params": dict(policy.supervised_params),
    }


def policy_from_dict(kind: ComponentKind, doc: dict, errors, prefix: str) -> Optional[KindPolicy]:
    try:
        return KindPolicy(
            kind=kind,
            mode=doc.get("mode", "modeled"),
            features=tuple(doc.get("features", ())),
            neighbor_features=tuple(
                NeighborFeature.parse(t) for t in doc.get("neighbor_features", ())
            ),
            aggregate_edges=tuple(
                AggregateEdge.parse(t) for t in doc.get("aggregate_edges", ())
            ),
            unsupervised=doc.get("unsupervised", "iforest"),
            supervised=doc.get("supervised", "dtree"),
            unsupervised_params=dict(doc.get("unsupervised_params", {})),
            supervised_params=dict(doc.get("supervised_params", {})),
        )
    except Exception as exc:  # noqa: BLE001 - collected as a field error
        errors.append((prefix, str(exc)))
        return None


def config_to_dict(cfg: EngineConfig) -> dict:
    doc = {
        "pipeline": {
            "update_graph_interval_s": cfg.update_graph_interval_s,
            "update_models_interval_s": cfg.update_models_interval_s,
            "max_observations": cfg.max_observations,
            "min_training_rows": cfg.min_training_rows,
            "rng_seed": cfg.rng_seed,
        },
        "outliers": {
            "fraction": cfg.outliers.fraction,
            "sigma_shift": cfg.outliers.sigma_shift,
            "min_count": cfg.outliers.min_count,
            "min_anomalies": cfg.outliers.min_anomalies,
            "shift_features": cfg.outliers.shift_features,
        },
        "kinds": {k.value: policy_to_dict(p) for k, p in sorted(cfg.policies.items())},
    }
    if cfg.evaluation_order_override is not None:
        doc["pipeline"]["evaluation_order"] = [k.value for k in cfg.evaluation_order_override]
    doc.update({
        "simulator": {
            "node_count": cfg.simulator.node_count,
            "namespace_count": cfg.simulator.namespace_count,
            "deployments_per_namespace": cfg.simulator.deployments_per_namespace,
            "replicas_per_deployment": cfg.simulator.replicas_per_deployment,
            "containers_per_pod": cfg.simulator.containers_per_pod,
            "metric_baselines": {
                name: list(pair) for name, pair in cfg.simulator.metric_baselines.items()
            },
            "tick_interval": cfg.simulator.tick_interval,
            "rng_seed": cfg.simulator.rng_seed,
            "cpu_capacity": cfg.simulator.cpu_capacity,
            "mem_capacity": cfg.simulator.mem_capacity,
            "system_cpu": cfg.simulator.system_cpu,
            "system_mem": cfg.simulator.system_mem,
            "pod_cpu_limit": cfg.simulator.pod_cpu_limit,
            "mem_leak_rate": cfg.simulator.mem_leak_rate,
            "ramp_ticks": cfg.simulator.ramp_ticks,
            "recovery_ticks": cfg.simulator.recovery_ticks,
        },
    })
    if cfg.live is not None:
        doc["live"] = {
            "base_url": cfg.live.base_url,
            "topology_snapshot": cfg.live.topology_snapshot,
            "queries": [
                {
                    "kind": q.kind.value,
                    "metric_name": q.metric_name,
                    "promql": q.promql,
                    "unit": q.unit,
                }
                for q in cfg.live.queries
            ],
        }
    return doc


def config_from_dict(doc: dict) -> EngineConfig:
    errors: list[tuple[str, str]] = []
    pipeline = doc.get("pipeline", {})
    outliers_doc = doc.get("outliers", {})

    def number(section: dict, key: str, default, prefix: str):
        value = section.get(key, default)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            errors.append((f"{prefix}.{key}", f"expected a number, got {value!r}"))
            return default
        return value

    graph_interval = number(pipeline, "update_graph_interval_s", 5.0, "pipeline")
    models_interval = number(pipeline, "update_models_interval_s", 60.0, "pipeline")
    max_obs = int(number(pipeline, "max_observations", 10000, "pipeline"))
    min_rows = int(number(pipeline, "min_training_rows", 30, "pipeline"))
    rng_seed = int(number(pipeline, "rng_seed", 0, "pipeline"))
    order_override = None
    if "evaluation_order" in pipeline:
        try:
            order_override = tuple(
                ComponentKind.parse(name) for name in pipeline["evaluation_order"]
            )
        except Exception as exc:  # noqa: BLE001
            errors.append(("pipeline.evaluation_order", str(exc)))

    try:
        outliers = OutlierConfig(
            fraction=number(outliers_doc, "fraction", 0.02, "outliers"),
            sigma_shift=number(outliers_doc, "sigma_shift", 3.0, "outliers"),
            min_count=int(number(outliers_doc, "min_count", 3, "outliers")),
            min_anomalies=int(number(outliers_doc, "min_anomalies", 1, "outliers")),
            shift_features=outliers_doc.get("shift_features", "all"),
        )
    except ValueError as exc:
        errors.append(("outliers", str(exc)))
        outliers = OutlierConfig()

    if "kinds" in doc:
        policies: dict[ComponentKind, KindPolicy] = {}
        for kind_name, policy_doc in doc["kinds"].items():
            try:
                kind = ComponentKind.parse(kind_name)
            except Exception as exc:  # noqa: BLE001
                errors.append((f"kinds.{kind_name}", str(exc)))
                continue
            policy = policy_from_dict(kind, policy_doc, errors, f"kinds.{kind_name}")
            if policy is not None:
                policies[kind] = policy
    else:
        policies = default_policies()

    sim_doc = dict(doc.get("simulator", {}))
    if "metric_baselines" in sim_doc:
        sim_doc["metric_baselines"] = {
            name: tuple(pair) for name, pair in sim_doc["metric_baselines"].items()
        }
    try:
        simulator = SimTopologySpec(**sim_doc)
    except (TypeError, ValueError) as exc:
        errors.append(("simulator", str(exc)))
        simulator = SimTopologySpec()

    live = None
    if "live" in doc:
        live_doc = doc["live"]
        try:
            live = LiveConfig(
                base_url=live_doc["base_url"],
                topology_snapshot=live_doc.get("topology_snapshot", ""),
                queries=tuple(
                    MetricQuerySpec(
                        kind=ComponentKind.parse(q["kind"]),
                        metric_name=q["metric_name"],
                        promql=q["promql"],
                        unit=q.get("unit", ""),
                    )
                    for q in live_doc.get("queries", ())
                ),
            )
        except (KeyError, ValueError) as exc:
            errors.append(("live", str(exc)))

    cfg = EngineConfig(
        update_graph_interval_s=graph_interval,
        update_models_interval_s=models_interval,
        max_observations=max_obs,
        min_training_rows=min_rows,
        rng_seed=rng_seed,
        outliers=outliers,
        policies=policies,
        evaluation_order_override=order_override,
        simulator=simulator,
        live=live,
    )
    errors.extend(cfg.validate())
    if errors:
        raise ConfigError(errors)
    return cfg


def load_config(path: str) -> EngineConfig:
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    return config_from_dict(doc)


def with_seed(cfg: EngineConfig, seed: int) -> EngineConfig:
    return replace(cfg, rng_seed=seed, simulator=replace(cfg.simulator, rng_seed=seed))
