from .prometheus import MetricQuerySpec, scrape_prometheus
from .replay import MetricUpdate, ReplayBatch, replay_load, replay_record
from .simulator import (
    ClusterSimulator,
    FaultSpec,
    SimTopologySpec,
    default_metric_schema,
    sim_init,
)

__all__ = [
    "MetricQuerySpec",
    "scrape_prometheus",
    "MetricUpdate",
    "ReplayBatch",
    "replay_load",
    "replay_record",
    "ClusterSimulator",
    "FaultSpec",
    "SimTopologySpec",
    "default_metric_schema",
    "sim_init",
]
