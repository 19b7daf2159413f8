import numpy as np
import pytest

from sentinel.errors import (
    DanglingEndpoint,
    InconsistentSnapshot,
    NotFound,
    OutOfRange,
    UnknownKind,
    UnknownMetric,
)
from sentinel.graph.store import (
    ComponentKind,
    EdgeType,
    GraphEdge,
    GraphNode,
    GraphSnapshot,
    GraphStore,
    ScoreSource,
)

POD = ComponentKind.POD
NODE = ComponentKind.NODE


def pod(node_id, **metrics):
    return GraphNode(node_id, POD, name=node_id, metrics=metrics)


class TestUpsert:
    def test_merge_keeps_existing_metrics(self):
        g = GraphStore()
        g.upsert_node(pod("p1", cpu=0.2))
        g.upsert_node(pod("p1", mem=1e8))
        merged = g.get_node("p1")
        assert merged.metrics == {"cpu": 0.2, "mem": 1e8}

    def test_unknown_kind_rejected(self):
        g = GraphStore()
        with pytest.raises(UnknownKind):
            g.upsert_node(GraphNode("x", "Foo"))
        with pytest.raises(UnknownKind):
            ComponentKind.parse("Foo")

    def test_thousand_distinct_pods(self):
        g = GraphStore()
        for i in range(1000):
            g.upsert_node(pod(f"p{i}"))
        assert g.node_count() == 1000

    def test_undeclared_metric_rejected_by_name(self):
        g = GraphStore(metric_schema={POD: {"cpu_usage"}})
        with pytest.raises(UnknownMetric) as exc:
            g.upsert_node(pod("p1", bogus=1.0))
        assert "bogus" in str(exc.value)

    def test_score_preserved_unless_set(self):
        g = GraphStore()
        g.upsert_node(pod("p1"))
        g.set_anomaly_score("p1", 0.7, ScoreSource.MODEL)
        g.upsert_node(pod("p1", cpu=0.1))
        assert g.get_node("p1").anomaly_score == 0.7
        update = pod("p1")
        update.anomaly_score = 0.2
        update.score_source = ScoreSource.AGGREGATE
        g.upsert_node(update)
        assert g.get_node("p1").anomaly_score == 0.2
        assert g.get_node("p1").score_source is ScoreSource.AGGREGATE


class TestRemove:
    def test_remove_counts_incident_edges(self):
        g = GraphStore()
        g.upsert_node(pod("p1"))
        for i in range(3):
            g.upsert_node(GraphNode(f"n{i}", NODE))
        g.add_edge(GraphEdge("p1", "n0", EdgeType.RUNS_ON))
        g.add_edge(GraphEdge("p1", "n1", EdgeType.RUNS_ON))
        g.add_edge(GraphEdge("n2", "p1", EdgeType.MANAGES))
        assert g.remove_node("p1") == 3
        assert g.edge_count() == 0

    def test_remove_missing_is_noop(self):
        g = GraphStore()
        assert g.remove_node("ghost") == 0

    def test_get_after_remove_raises(self):
        g = GraphStore()
        g.upsert_node(pod("p1"))
        g.remove_node("p1")
        with pytest.raises(NotFound):
            g.get_node("p1")


class TestEdges:
    def test_duplicate_add_is_noop(self):
        g = GraphStore()
        g.upsert_node(pod("p1"))
        g.upsert_node(GraphNode("n1", NODE))
        g.add_edge(GraphEdge("p1", "n1", EdgeType.RUNS_ON))
        g.add_edge(GraphEdge("p1", "n1", EdgeType.RUNS_ON))
        assert g.edge_count() == 1

    def test_dangling_endpoint(self):
        g = GraphStore()
        g.upsert_node(pod("p1"))
        with pytest.raises(DanglingEndpoint):
            g.add_edge(GraphEdge("p1", "missing", EdgeType.RUNS_ON))

    def test_remove_absent_edge_is_noop(self):
        g = GraphStore()
        g.upsert_node(pod("p1"))
        g.upsert_node(GraphNode("n1", NODE))
        g.remove_edge("p1", "n1", EdgeType.RUNS_ON)  # no raise
        assert g.edge_count() == 0


class TestNeighbors:
    def test_manages_out(self):
        g = GraphStore()
        g.upsert_node(GraphNode("r1", ComponentKind.REPLICASET))
        g.upsert_node(pod("p1"))
        g.upsert_node(pod("p2"))
        g.add_edge(GraphEdge("r1", "p1", EdgeType.MANAGES))
        g.add_edge(GraphEdge("r1", "p2", EdgeType.MANAGES))
        assert [n.id for n in g.neighbors("r1", EdgeType.MANAGES, "out")] == ["p1", "p2"]

    def test_isolated_node(self):
        g = GraphStore()
        g.upsert_node(pod("p1"))
        assert g.neighbors("p1", EdgeType.RUNS_ON, "both") == []

    def test_both_is_union_without_duplicates(self):
        g = GraphStore()
        g.upsert_node(pod("a"))
        g.upsert_node(pod("b"))
        g.add_edge(GraphEdge("a", "b", EdgeType.MANAGES))
        g.add_edge(GraphEdge("b", "a", EdgeType.MANAGES))
        assert [n.id for n in g.neighbors("a", EdgeType.MANAGES, "both")] == ["b"]

    def test_missing_id(self):
        g = GraphStore()
        with pytest.raises(NotFound):
            g.neighbors("ghost", EdgeType.MANAGES, "out")


class TestScores:
    def test_set_and_read(self):
        g = GraphStore()
        g.upsert_node(pod("p1"))
        g.set_anomaly_score("p1", 0.97, ScoreSource.MODEL)
        node = g.get_node("p1")
        assert node.anomaly_score == 0.97
        assert node.score_source is ScoreSource.MODEL

    @pytest.mark.parametrize("bad", [1.5, -0.1, 2.0])
    def test_out_of_range(self, bad):
        g = GraphStore()
        g.upsert_node(pod("p1"))
        with pytest.raises(OutOfRange):
            g.set_anomaly_score("p1", bad)

    def test_boundaries_valid(self):
        g = GraphStore()
        g.upsert_node(pod("p1"))
        g.set_anomaly_score("p1", 0.0)
        assert g.get_node("p1").anomaly_score == 0.0
        g.set_anomaly_score("p1", 1.0)
        assert g.get_node("p1").anomaly_score == 1.0

    def test_missing_node(self):
        g = GraphStore()
        with pytest.raises(NotFound):
            g.set_anomaly_score("ghost", 0.5)


def random_graph(rng, max_nodes=500):
    g = GraphStore()
    n = int(rng.integers(1, max_nodes + 1))
    kinds = list(ComponentKind)
    for i in range(n):
        kind = kinds[int(rng.integers(len(kinds)))]
        metrics = {f"m{j}": float(rng.normal()) for j in range(int(rng.integers(0, 4)))}
        node = GraphNode(f"node-{i}", kind, name=f"n{i}", metrics=metrics)
        if rng.random() < 0.5:
            node.anomaly_score = float(rng.random())
            node.score_source = ScoreSource.MODEL
        g.upsert_node(node, now=float(rng.random()))
    edge_types = list(EdgeType)
    for _ in range(int(rng.integers(0, 3 * n))):
        src = f"node-{int(rng.integers(n))}"
        dst = f"node-{int(rng.integers(n))}"
        g.add_edge(GraphEdge(src, dst, edge_types[int(rng.integers(len(edge_types)))]))
    return g


def graphs_equal(a: GraphSnapshot, b: GraphSnapshot) -> bool:
    if len(a.nodes) != len(b.nodes) or len(a.edges) != len(b.edges):
        return False
    for na, nb in zip(a.nodes, b.nodes):
        if (na.id, na.kind, na.name, na.metrics, na.anomaly_score, na.score_source,
                na.last_updated) != (nb.id, nb.kind, nb.name, nb.metrics,
                                     nb.anomaly_score, nb.score_source, nb.last_updated):
            return False
    return all(ea.key() == eb.key() for ea, eb in zip(a.edges, b.edges))


class TestSnapshots:
    def test_empty_graph(self):
        snap = GraphStore().snapshot()
        assert snap.nodes == () and snap.edges == ()

    def test_roundtrip_identity_100_random_graphs(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            g = random_graph(rng)
            snap = g.snapshot(now=1.0)
            restored = GraphStore()
            restored.load_snapshot(snap)
            assert graphs_equal(snap, restored.snapshot(now=1.0))

    def test_json_roundtrip_schema(self):
        rng = np.random.default_rng(3)
        g = random_graph(rng, max_nodes=60)
        snap = g.snapshot(now=2.0)
        doc = snap.to_json()
        back = GraphSnapshot.from_json(doc)
        assert back.sequence == snap.sequence and back.taken_at == snap.taken_at
        assert [n.id for n in back.nodes] == [n.id for n in snap.nodes]
        assert [(n.kind, n.metrics, n.anomaly_score) for n in back.nodes] == [
            (n.kind, n.metrics, n.anomaly_score) for n in snap.nodes
        ]
        assert [e.key() for e in back.edges] == [e.key() for e in snap.edges]
        import json

        keys = set(json.loads(doc))
        assert keys == {"taken_at", "sequence", "nodes", "edges"}
        node_keys = set(json.loads(doc)["nodes"][0])
        assert node_keys == {"id", "kind", "name", "metrics", "anomaly_score", "score_source"}

    def test_dangling_edge_rejected(self):
        g = GraphStore()
        g.upsert_node(pod("p1"))
        snap = g.snapshot()
        bad = GraphSnapshot(
            nodes=snap.nodes,
            edges=(GraphEdge("p1", "ghost", EdgeType.RUNS_ON),),
            taken_at=snap.taken_at,
            sequence=snap.sequence,
        )
        with pytest.raises(InconsistentSnapshot):
            GraphStore().load_snapshot(bad)

    def test_sequence_advances_once_per_mutation_batch(self):
        g = GraphStore()
        s0 = g.snapshot().sequence
        # snapshots are pure reads: repeatable with identical results
        assert g.snapshot().sequence == s0
        g.upsert_node(pod("p1"))
        s1 = g.snapshot().sequence
        assert s1 > s0
        with g.batch():
            g.upsert_node(pod("p2"))
            g.upsert_node(pod("p3"))
            g.set_anomaly_score("p2", 0.5)
        s2 = g.snapshot().sequence
        assert s2 == s1 + 1  # the whole batch advanced the version once
        assert g.snapshot().sequence == s2


class TestInvariants:
    def test_referential_integrity_after_mutations(self):
        rng = np.random.default_rng(11)
        for _ in range(30):
            g = random_graph(rng, max_nodes=80)
            ids = [n.id for n in g.snapshot().nodes]
            for node_id in ids[:: max(1, len(ids) // 7)]:
                g.remove_node(node_id)
            snap = g.snapshot()
            live = {n.id for n in snap.nodes}
            for e in snap.edges:
                assert e.src in live and e.dst in live

    def test_neighbors_match_brute_force_edge_scan(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            g = random_graph(rng, max_nodes=60)
            snap = g.snapshot()
            if not snap.nodes:
                continue
            node = snap.nodes[int(rng.integers(len(snap.nodes)))]
            etype = list(EdgeType)[int(rng.integers(len(EdgeType)))]
            direction = ["in", "out", "both"][int(rng.integers(3))]
            expected = set()
            for e in snap.edges:
                if e.edge_type is not etype:
                    continue
                if direction in ("out", "both") and e.src == node.id:
                    expected.add(e.dst)
                if direction in ("in", "both") and e.dst == node.id:
                    expected.add(e.src)
            got = [n.id for n in g.neighbors(node.id, etype, direction)]
            assert got == sorted(expected)
