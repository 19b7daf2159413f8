import numpy as np
import pytest

from sentinel.errors import DuplicateFault, UnknownTarget
from sentinel.graph.store import ComponentKind
from sentinel.ingest.simulator import (
    ClusterSimulator,
    FaultSpec,
    SimTopologySpec,
    sim_init,
)


def spec(**overrides):
    defaults = dict(
        node_count=2,
        namespace_count=1,
        deployments_per_namespace=2,
        replicas_per_deployment=3,
        containers_per_pod=1,
        rng_seed=0,
    )
    defaults.update(overrides)
    return SimTopologySpec(**defaults)


def kind_count(snapshot, kind):
    return sum(1 for n in snapshot.nodes if n.kind is kind)


class TestTopology:
    def test_counts_follow_spec_arithmetic(self):
        snap = sim_init(spec())
        assert kind_count(snap, ComponentKind.POD) == 6
        assert kind_count(snap, ComponentKind.CONTAINER) == 6
        assert kind_count(snap, ComponentKind.NODE) == 2
        assert kind_count(snap, ComponentKind.DEPLOYMENT) == 2
        assert kind_count(snap, ComponentKind.REPLICASET) == 2
        assert kind_count(snap, ComponentKind.NAMESPACE) == 1

    def test_round_robin_splits_pods_evenly(self):
        sim = ClusterSimulator(spec())
        per_node = {}
        for pod in sim.pods:
            per_node.setdefault(sim.host_of(pod), []).append(pod)
        assert sorted(len(v) for v in per_node.values()) == [3, 3]

    def test_same_seed_identical_snapshots(self):
        a = sim_init(spec())
        b = sim_init(spec())
        assert a.to_json() == b.to_json()

    def test_single_replica_means_pod_per_deployment(self):
        snap = sim_init(spec(replicas_per_deployment=1))
        assert kind_count(snap, ComponentKind.POD) == kind_count(snap, ComponentKind.DEPLOYMENT)


class TestTicks:
    def test_determinism_same_seed_and_faults(self):
        a = ClusterSimulator(spec())
        b = ClusterSimulator(spec())
        for sim in (a, b):
            sim.inject_fault(FaultSpec("f1", sim.pods[0], "cpu_hog", workers=16))
        stream_a = [a.tick(t) for t in range(1, 8)]
        stream_b = [b.tick(t) for t in range(1, 8)]
        assert stream_a == stream_b

    def test_no_faults_pod_cpu_within_five_sigma(self):
        sim = ClusterSimulator(spec())
        mean, std = sim.spec.metric_baselines["cpu_usage"]
        for t in range(1, 101):
            updates = sim.tick(t)
            for pod in sim.pods:
                assert abs(updates[pod]["cpu_usage"] - mean) <= 5.0 * std

    def test_node_utilization_conserves_pod_usage(self):
        sim = ClusterSimulator(spec(node_count=3))
        s = sim.spec
        for t in range(1, 20):
            updates = sim.tick(t)
            per_node = {}
            for pod in sim.pods:
                per_node.setdefault(sim.host_of(pod), 0.0)
                per_node[sim.host_of(pod)] += updates[pod]["cpu_usage"]
            for node_id, pod_cpu in per_node.items():
                expected = (s.system_cpu + pod_cpu) / s.cpu_capacity
                assert updates[node_id]["cpu_util"] == expected

    def test_pod_metrics_are_sum_of_containers(self):
        sim = ClusterSimulator(spec(containers_per_pod=3))
        updates = sim.tick(1)
        for pod in sim.pods:
            containers = [f"{pod}/c{i}" for i in range(3)]
            for metric in ("cpu_usage", "mem_usage"):
                total = sum(updates[c][metric] for c in containers)
                assert updates[pod][metric] == pytest.approx(total, rel=1e-12)


class TestFaults:
    def test_cpu_hog_saturates_within_three_ticks(self):
        sim = ClusterSimulator(spec())
        target = sim.pods[0]
        sim.inject_fault(FaultSpec("f1", target, "cpu_hog", workers=32))
        last = None
        for t in range(1, 4):
            last = sim.tick(t)
        assert last[target]["cpu_usage"] >= 0.95 * sim.spec.pod_cpu_limit

    def test_worker_count_scales_intensity(self):
        sim = ClusterSimulator(spec())
        target = sim.pods[0]
        sim.inject_fault(FaultSpec("f1", target, "cpu_hog", workers=16))
        for t in range(1, 5):
            updates = sim.tick(t)
        assert updates[target]["cpu_usage"] == pytest.approx(0.5 * sim.spec.pod_cpu_limit)

    def test_mem_leak_is_nondecreasing_while_active(self):
        sim = ClusterSimulator(spec())
        target = sim.pods[0]
        sim.inject_fault(FaultSpec("f1", target, "mem_leak", workers=32))
        series = [sim.tick(t)[target]["mem_usage"] for t in range(1, 11)]
        assert all(b >= a for a, b in zip(series, series[1:]))

    def test_clear_returns_to_baseline_within_five_ticks(self):
        sim = ClusterSimulator(spec())
        target = sim.pods[0]
        fid = sim.inject_fault(FaultSpec("", target, "mem_leak", workers=32))
        for t in range(1, 9):
            sim.tick(t)
        sim.clear_fault(fid)
        mean, std = sim.spec.metric_baselines["mem_usage"]
        updates = None
        for t in range(9, 14):
            updates = sim.tick(t)
        assert abs(updates[target]["mem_usage"] - mean) <= 5.0 * std

    def test_unknown_target_rejected(self):
        sim = ClusterSimulator(spec())
        with pytest.raises(UnknownTarget):
            sim.inject_fault(FaultSpec("f1", "ghost-pod", "cpu_hog"))

    def test_duplicate_fault_rejected(self):
        sim = ClusterSimulator(spec())
        target = sim.pods[0]
        sim.inject_fault(FaultSpec("f1", target, "cpu_hog"))
        with pytest.raises(DuplicateFault):
            sim.inject_fault(FaultSpec("f2", target, "cpu_hog"))

    def test_same_pod_can_host_different_fault_kinds(self):
        sim = ClusterSimulator(spec())
        target = sim.pods[0]
        sim.inject_fault(FaultSpec("f1", target, "cpu_hog"))
        sim.inject_fault(FaultSpec("f2", target, "mem_leak"))
        assert len(sim.active_faults()) == 2

    def test_bounded_fault_expires_on_its_own(self):
        sim = ClusterSimulator(spec(tick_interval=1.0))
        target = sim.pods[0]
        sim.inject_fault(FaultSpec("f1", target, "cpu_hog", duration=3.0))
        for t in range(1, 6):
            sim.tick(t)
        assert sim.active_faults() == []

    def test_clear_unknown_fault_raises(self):
        sim = ClusterSimulator(spec())
        with pytest.raises(UnknownTarget):
            sim.clear_fault("nope")
