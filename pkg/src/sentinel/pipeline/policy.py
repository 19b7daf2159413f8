"""Per-kind evaluation policies and bottom-up ordering.

A kind is either *modeled* (scored by a standardizer + classifier over
its feature vector) or an *aggregator* (scored as the mean of scores
collected over declared edge types). Aggregators need their source
kinds scored first, so evaluation follows a topological order of the
kind dependency graph, bottom of the resource model upwards.

Neighbor-derived features read other kinds' *metrics*, which exist
before any scoring happens in a tick, so they impose no ordering
constraint; only aggregator score reads do.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import CyclicPolicy
from ..graph.store import ComponentKind, EdgeType

# closed vocabulary of which kinds each edge type connects; extending
# the topology is a config change (pass a custom map), not a code change
EDGE_KIND_MAP: dict[EdgeType, tuple[tuple[ComponentKind, ComponentKind], ...]] = {
    EdgeType.RUNS_ON: ((ComponentKind.POD, ComponentKind.NODE),),
    EdgeType.MANAGES: (
        (ComponentKind.DEPLOYMENT, ComponentKind.REPLICASET),
        (ComponentKind.REPLICASET, ComponentKind.POD),
        (ComponentKind.STATEFULSET, ComponentKind.POD),
    ),
    EdgeType.CONTAINS: ((ComponentKind.POD, ComponentKind.CONTAINER),),
    EdgeType.EXPOSES: ((ComponentKind.SERVICE, ComponentKind.PORT),),
    EdgeType.SELECTS: ((ComponentKind.SERVICE, ComponentKind.POD),),
    EdgeType.BELONGS_TO: (
        (ComponentKind.NAMESPACE, ComponentKind.CLUSTER),
        (ComponentKind.POD, ComponentKind.NAMESPACE),
    ),
}

# tie-break rank for the topological sort; yields the canonical
# bottom-up order for the default policies
CANONICAL_ORDER = (
    ComponentKind.CONTAINER,
    ComponentKind.POD,
    ComponentKind.NODE,
    ComponentKind.REPLICASET,
    ComponentKind.STATEFULSET,
    ComponentKind.DEPLOYMENT,
    ComponentKind.SERVICE,
    ComponentKind.NAMESPACE,
    ComponentKind.CLUSTER,
    ComponentKind.PORT,
    ComponentKind.LABEL,
)

AGGREGATIONS = ("mean", "max", "sum")


@dataclass(frozen=True)
class NeighborFeature:
    edge_type: EdgeType
    direction: str  # in | out
    metric: str
    aggregation: str = "mean"

    def __post_init__(self):
        if self.direction not in ("in", "out"):
            raise ValueError(f"direction must be in|out, got {self.direction!r}")
        if self.aggregation not in AGGREGATIONS:
            raise ValueError(f"aggregation must be one of {AGGREGATIONS}")

    @property
    def name(self) -> str:
        return f"{self.edge_type.value.lower()}_{self.direction}_{self.metric}_{self.aggregation}"

    @classmethod
    def parse(cls, text: str) -> "NeighborFeature":
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError(
                f"neighbor feature must be EDGE:direction:metric:aggregation, got {text!r}"
            )
        return cls(EdgeType.parse(parts[0]), parts[1], parts[2], parts[3])


@dataclass(frozen=True)
class AggregateEdge:
    edge_type: EdgeType
    direction: str  # in | out

    def __post_init__(self):
        if self.direction not in ("in", "out"):
            raise ValueError(f"direction must be in|out, got {self.direction!r}")

    @classmethod
    def parse(cls, text: str) -> "AggregateEdge":
        parts = text.split(":")
        if len(parts) == 1:
            return cls(EdgeType.parse(parts[0]), "out")
        if len(parts) == 2:
            return cls(EdgeType.parse(parts[0]), parts[1])
        raise ValueError(f"aggregate edge must be EDGE or EDGE:direction, got {text!r}")


@dataclass(frozen=True)
class KindPolicy:
    kind: ComponentKind
    mode: str  # modeled | aggregator
    features: tuple[str, ...] = ()
    neighbor_features: tuple[NeighborFeature, ...] = ()
    aggregate_edges: tuple[AggregateEdge, ...] = ()
    unsupervised: str = "iforest"
    supervised: str = "dtree"
    unsupervised_params: dict = field(default_factory=dict)
    supervised_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in ("modeled", "aggregator"):
            raise ValueError(f"mode must be modeled|aggregator, got {self.mode!r}")
        if self.mode == "modeled" and not (self.features or self.neighbor_features):
            raise ValueError(f"modeled kind {self.kind.value} declares no features")
        if self.mode == "aggregator" and not self.aggregate_edges:
            raise ValueError(f"aggregator kind {self.kind.value} declares no edge types")

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(self.features) + tuple(nf.name for nf in self.neighbor_features)


def aggregation_sources(
    policy: KindPolicy,
    edge_kind_map: dict[EdgeType, tuple[tuple[ComponentKind, ComponentKind], ...]],
) -> set[ComponentKind]:
    """Kinds whose scores this aggregator reads."""
    sources: set[ComponentKind] = set()
    for edge in policy.aggregate_edges:
        for src, dst in edge_kind_map.get(edge.edge_type, ()):
            if edge.direction == "out" and src == policy.kind:
                sources.add(dst)
            elif edge.direction == "in" and dst == policy.kind:
                sources.add(src)
    return sources


def evaluation_order(
    policies: dict[ComponentKind, KindPolicy],
    edge_kind_map: dict[EdgeType, tuple[tuple[ComponentKind, ComponentKind], ...]] = None,
) -> list[ComponentKind]:
    """Topological order over score dependencies, canonical-rank ties."""
    edge_kind_map = EDGE_KIND_MAP if edge_kind_map is None else edge_kind_map
    deps: dict[ComponentKind, set[ComponentKind]] = {}
    for kind, policy in policies.items():
        if policy.mode == "aggregator":
            deps[kind] = {
                s for s in aggregation_sources(policy, edge_kind_map) if s in policies
            }
        else:
            deps[kind] = set()

    rank = {k: i for i, k in enumerate(CANONICAL_ORDER)}
    order: list[ComponentKind] = []
    remaining = dict(deps)
    while remaining:
        ready = [k for k, d in remaining.items() if not d]
        if not ready:
            cycle = _find_cycle(remaining)
            raise CyclicPolicy([k.value for k in cycle])
        pick = min(ready, key=lambda k: (rank.get(k, len(rank)), k.value))
        order.append(pick)
        del remaining[pick]
        for d in remaining.values():
            d.discard(pick)
    return order


def _find_cycle(deps: dict[ComponentKind, set[ComponentKind]]) -> list[ComponentKind]:
    start = next(iter(deps))
    seen: list[ComponentKind] = []
    node = start
    while node not in seen:
        seen.append(node)
        node = next(iter(deps[node]))
    return seen[seen.index(node):] + [node]


def default_policies() -> dict[ComponentKind, KindPolicy]:
    pod_metrics = ("cpu_usage", "mem_usage", "net_rx", "net_tx")
    return {
        ComponentKind.CONTAINER: KindPolicy(
            ComponentKind.CONTAINER, "modeled", features=pod_metrics
        ),
        ComponentKind.POD: KindPolicy(
            ComponentKind.POD,
            "modeled",
            features=pod_metrics,
            neighbor_features=(NeighborFeature(EdgeType.RUNS_ON, "out", "cpu_util", "mean"),),
        ),
        ComponentKind.NODE: KindPolicy(
            ComponentKind.NODE, "modeled", features=("cpu_util", "mem_util", "pod_count")
        ),
        ComponentKind.REPLICASET: KindPolicy(
            ComponentKind.REPLICASET,
            "aggregator",
            aggregate_edges=(AggregateEdge(EdgeType.MANAGES, "out"),),
        ),
        ComponentKind.STATEFULSET: KindPolicy(
            ComponentKind.STATEFULSET,
            "aggregator",
            aggregate_edges=(AggregateEdge(EdgeType.MANAGES, "out"),),
        ),
        ComponentKind.DEPLOYMENT: KindPolicy(
            ComponentKind.DEPLOYMENT,
            "aggregator",
            aggregate_edges=(AggregateEdge(EdgeType.MANAGES, "out"),),
        ),
        ComponentKind.SERVICE: KindPolicy(
            ComponentKind.SERVICE,
            "aggregator",
            aggregate_edges=(AggregateEdge(EdgeType.SELECTS, "out"),),
        ),
        ComponentKind.NAMESPACE: KindPolicy(
            ComponentKind.NAMESPACE,
            "aggregator",
            aggregate_edges=(AggregateEdge(EdgeType.BELONGS_TO, "in"),),
        ),
    }


def metric_schema_from_policies(
    policies: dict[ComponentKind, KindPolicy],
) -> dict[ComponentKind, set[str]]:
    schema: dict[ComponentKind, set[str]] = {kind: set() for kind in ComponentKind}
    for kind, policy in policies.items():
        schema[kind] = set(policy.features)
    return schema
