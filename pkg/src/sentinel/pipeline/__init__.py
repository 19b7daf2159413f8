from .bundles import BundleRegistry, ModelBundle, training_fingerprint
from .engine import (
    FeatureExtraction,
    KindTickReport,
    ModelUpdateReport,
    ModelUpdateResult,
    Pipeline,
    TickReport,
    extract_features,
)
from .observations import Observation, ObservationStore
from .outliers import OutlierConfig, inject_synthetic_outliers
from .policy import (
    AggregateEdge,
    CANONICAL_ORDER,
    EDGE_KIND_MAP,
    KindPolicy,
    NeighborFeature,
    default_policies,
    evaluation_order,
    metric_schema_from_policies,
)
from .scheduler import Scheduler, SimulatedClock, WallClock
from .standardize import Standardizer

__all__ = [
    "BundleRegistry",
    "ModelBundle",
    "training_fingerprint",
    "FeatureExtraction",
    "KindTickReport",
    "ModelUpdateReport",
    "ModelUpdateResult",
    "Pipeline",
    "TickReport",
    "extract_features",
    "Observation",
    "ObservationStore",
    "OutlierConfig",
    "inject_synthetic_outliers",
    "AggregateEdge",
    "CANONICAL_ORDER",
    "EDGE_KIND_MAP",
    "KindPolicy",
    "NeighborFeature",
    "default_policies",
    "evaluation_order",
    "metric_schema_from_policies",
    "Scheduler",
    "SimulatedClock",
    "WallClock",
    "Standardizer",
]
