from .store import (
    ComponentKind,
    EdgeType,
    GraphEdge,
    GraphNode,
    GraphSnapshot,
    GraphStore,
    ScoreSource,
)

__all__ = [
    "ComponentKind",
    "EdgeType",
    "GraphEdge",
    "GraphNode",
    "GraphSnapshot",
    "GraphStore",
    "ScoreSource",
]
