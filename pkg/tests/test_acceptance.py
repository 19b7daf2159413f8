"""Acceptance criteria for the engine, one test per criterion.

Run with `pytest tests/test_acceptance.py -v -s` to see one PASS line
per criterion. Quality anchors run on the bundled synthetic benchmark;
scenario criteria run the full simulator + pipeline stack.
"""

import time

import numpy as np
import pytest

from sentinel.datasets import make_benchmark
from sentinel.metrics import confusion_counts, f1_score, silhouette_score
from sentinel.models import (
    DecisionTreeParams,
    FeatureMatrix,
    IsolationForestParams,
    LabeledDataset,
    LogRegParams,
    SvmParams,
    dtree_fit,
    iforest_fit,
    logreg_fit,
    svm_fit,
)
from sentinel.models.dbscan import DbscanParams, dbscan_label
from sentinel.models.logreg import log_loss_and_grad
from sentinel.models.svm import kernel_matrix
from sentinel.pipeline.standardize import Standardizer
from sentinel.tuning import stratified_split, tune_unsupervised

from oracles import (
    canonical_clusters,
    central_difference_gradient,
    dbscan_reference,
    l1_logreg_oracle,
    silhouette_reference,
    svm_dual_qp,
)


def verdict(name: str, passed: bool, detail: str = ""):
    marker = "PASS" if passed else "FAIL"
    print(f"ACCEPTANCE {name}: {marker}" + (f"  ({detail})" if detail else ""))
    assert passed, f"{name}: {detail}"


@pytest.fixture(scope="module")
def benchmark():
    return make_benchmark(seed=0, n=1000, d=4, anomaly_fraction=0.02)


@pytest.fixture(scope="module")
def tuned_unsupervised(benchmark):
    """Tune all three labelers (50 trials each) and keep the wall time."""
    X, _ = benchmark
    started = time.perf_counter()
    results = {
        model: tune_unsupervised(model, X, n_trials=50, seed=0)
        for model in ("iforest", "dbscan", "ocsvm")
    }
    elapsed = time.perf_counter() - started
    return results, elapsed


class TestQualityAnchors:
    def test_unsupervised_silhouette_anchor(self, tuned_unsupervised):
        results, elapsed = tuned_unsupervised
        details = []
        ok = elapsed <= 60.0
        for model, result in results.items():
            best = result.best
            details.append(f"{model}={best.objective:.4f}")
            ok = ok and best is not None and best.objective >= 0.70
        verdict(
            "unsupervised-silhouette>=0.70",
            ok,
            ", ".join(details) + f", runtime={elapsed:.1f}s<=60s",
        )

    def test_supervised_f1_anchor(self, benchmark, tuned_unsupervised):
        X, _ = benchmark
        results, _ = tuned_unsupervised
        params = IsolationForestParams(**results["iforest"].best.params)
        labels = iforest_fit(X, params).label(X).labels
        std = Standardizer.fit(X.rows)
        Z = FeatureMatrix(std.transform(X.rows), X.feature_names)

        passing_seeds = 0
        worst = 1.0
        for seed in range(10):
            train_idx, test_idx = stratified_split(labels, 0.2, seed)
            train = LabeledDataset(
                FeatureMatrix(Z.rows[train_idx], Z.feature_names), labels[train_idx]
            )
            X_test = FeatureMatrix(Z.rows[test_idx], Z.feature_names)
            y_test = labels[test_idx]
            scores = []
            for fitted in (
                dtree_fit(train, DecisionTreeParams(criterion="entropy", splitter="best",
                                                    max_depth=35, rng_seed=seed)),
                logreg_fit(train, LogRegParams(penalty="l1", C=1.0)),
                svm_fit(train, SvmParams(kernel="rbf", C=0.6, gamma=0.25, rng_seed=seed)),
            ):
                predictions = fitted.predict_proba(X_test) > 0.5
                scores.append(f1_score(confusion_counts(predictions, y_test)))
            worst = min(worst, min(scores))
            if all(s >= 0.85 for s in scores):
                passing_seeds += 1
        verdict(
            "supervised-f1>=0.85-on-9-of-10-seeds",
            passing_seeds >= 9,
            f"{passing_seeds}/10 seeds, worst F1={worst:.4f}",
        )

    def test_prediction_latency_anchor(self, benchmark, tuned_unsupervised):
        X, _ = benchmark
        results, _ = tuned_unsupervised
        params = IsolationForestParams(**results["iforest"].best.params)
        labels = iforest_fit(X, params).label(X).labels
        tree = dtree_fit(
            LabeledDataset(X, labels),
            DecisionTreeParams(criterion="entropy", rng_seed=0),
        )
        tree.predict_proba(X)  # warm up
        started = time.perf_counter()
        tree.predict_proba(X)
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        verdict("dtree-predict-1000<=50ms", elapsed_ms <= 50.0, f"{elapsed_ms:.2f}ms")


class TestOracleEquivalence:
    def test_dbscan_matches_bruteforce_on_100_instances(self):
        rng = np.random.default_rng(2024)
        mismatches = 0
        for _ in range(100):
            n = int(rng.integers(2, 51))
            d = int(rng.integers(1, 6))
            rows = rng.normal(size=(n, d)) * rng.uniform(0.5, 3.0)
            eps = float(rng.uniform(0.2, 2.5))
            min_samples = int(rng.integers(1, 9))
            mine = dbscan_label(
                FeatureMatrix(rows, tuple(f"f{i}" for i in range(d))),
                DbscanParams(eps=eps, min_samples=min_samples),
            )
            reference = dbscan_reference(rows, eps, min_samples)
            if not np.array_equal(
                canonical_clusters(mine.clusters), canonical_clusters(reference)
            ):
                mismatches += 1
        verdict("dbscan-oracle-equivalence", mismatches == 0, f"{mismatches} mismatches/100")

    def test_silhouette_matches_bruteforce_on_100_instances(self):
        rng = np.random.default_rng(77)
        worst = 0.0
        for _ in range(100):
            n = int(rng.integers(3, 61))
            d = int(rng.integers(1, 5))
            rows = rng.normal(size=(n, d)) * rng.uniform(0.5, 4.0)
            assignment = rng.integers(int(rng.integers(2, 5)), size=n)
            if np.unique(assignment).size < 2:
                assignment[0] = assignment[0] + 1
            mine = silhouette_score(
                FeatureMatrix(rows, tuple(f"f{i}" for i in range(d))), assignment
            )
            reference = silhouette_reference(rows, assignment)
            worst = max(worst, abs(mine - reference))
        verdict("silhouette-oracle-1e-9", worst <= 1e-9, f"max |diff|={worst:.2e}")

    def test_logreg_gradient_check_20_instances(self):
        rng = np.random.default_rng(5)
        worst = 0.0
        for _ in range(20):
            n = int(rng.integers(5, 30))
            d = int(rng.integers(1, 6))
            X = rng.normal(size=(n, d))
            y01 = (rng.random(n) < 0.5).astype(float)
            w = rng.normal(size=d)
            b = float(rng.normal())
            _, grad_w, grad_b = log_loss_and_grad(w, b, X, y01)
            packed = np.concatenate([w, [b]])

            def f(z):
                loss, _, _ = log_loss_and_grad(z[:d], float(z[-1]), X, y01)
                return loss

            numeric = central_difference_gradient(f, packed)
            analytic = np.concatenate([grad_w, [grad_b]])
            rel = np.abs(analytic - numeric) / np.maximum(np.abs(numeric), 1e-8)
            worst = max(worst, float(rel.max()))
        verdict("logreg-gradient-1e-5", worst <= 1e-5, f"max rel err={worst:.2e}")

    def test_svm_dual_matches_qp_on_20_instances(self):
        rng = np.random.default_rng(99)
        worst = 0.0
        for trial in range(20):
            n = int(rng.integers(10, 41))
            d = int(rng.integers(1, 4))
            rows = rng.normal(size=(n, d))
            labels = rows @ rng.normal(size=d) + 0.5 * rng.normal(size=n) > 0
            if labels.all() or not labels.any():
                labels[0] = not labels[0]
            kernel = "linear" if trial % 2 == 0 else "rbf"
            gamma = float(rng.uniform(0.2, 2.0))
            C = float(rng.uniform(0.4, 2.0))
            model = svm_fit(
                LabeledDataset(FeatureMatrix(rows, tuple(f"f{i}" for i in range(d))), labels),
                SvmParams(kernel=kernel, C=C, gamma=gamma, smo_tolerance=1e-6,
                          max_passes=5, max_sweeps=20000, calibration_fraction=0.0,
                          rng_seed=trial),
            )
            targets = np.where(labels, 1.0, -1.0)
            reference = svm_dual_qp(kernel_matrix(rows, rows, kernel, gamma), targets, C)
            worst = max(worst, abs(model.dual_objective() - reference))
        verdict("svm-dual-qp-1e-3", worst <= 1e-3, f"max |gap|={worst:.2e}")


class TestExperiments:
    @pytest.mark.parametrize("kind,label", [("cpu-hog", "experiment-1-cpu-hog"),
                                            ("mem-leak", "experiment-2-mem-leak")])
    def test_fault_scenarios(self, kind, label):
        from sentinel.experiments import run_experiment

        started = time.perf_counter()
        report = run_experiment(kind, seed=0)
        elapsed = time.perf_counter() - started
        failed = [c["name"] for c in report["checks"] if not c["passed"]]
        verdict(
            label,
            report["pass"] and elapsed <= 30.0,
            f"runtime={elapsed:.1f}s<=30s"
            + (f", failed checks: {failed}" if failed else ", all checks green"),
        )


class TestPipelineInvariants:
    def test_invariant_suite_100_trials_each(self):
        from sentinel.config import EngineConfig
        from sentinel.graph.store import (
            ComponentKind,
            EdgeType,
            GraphEdge,
            GraphNode,
            GraphStore,
            ScoreSource,
        )
        from sentinel.pipeline.bundles import BundleRegistry, ModelBundle
        from sentinel.pipeline.engine import Pipeline
        from sentinel.pipeline.observations import ObservationStore
        from sentinel.pipeline.policy import AggregateEdge, KindPolicy

        rng = np.random.default_rng(1234)

        # aggregator sandwich + tick determinism on random scored graphs
        def random_scored_graph(rng):
            g = GraphStore()
            n_pods = int(rng.integers(2, 12))
            g.upsert_node(GraphNode("ns", ComponentKind.NAMESPACE))
            g.upsert_node(GraphNode("rs", ComponentKind.REPLICASET))
            for i in range(n_pods):
                pod = GraphNode(f"p{i}", ComponentKind.POD)
                g.upsert_node(pod)
                if rng.random() < 0.8:
                    g.set_anomaly_score(f"p{i}", float(rng.random()), ScoreSource.MODEL)
                g.add_edge(GraphEdge("rs", f"p{i}", EdgeType.MANAGES))
                g.add_edge(GraphEdge(f"p{i}", "ns", EdgeType.BELONGS_TO))
            return g

        policies = {
            ComponentKind.REPLICASET: KindPolicy(
                ComponentKind.REPLICASET, "aggregator",
                aggregate_edges=(AggregateEdge(EdgeType.MANAGES, "out"),),
            ),
            ComponentKind.NAMESPACE: KindPolicy(
                ComponentKind.NAMESPACE, "aggregator",
                aggregate_edges=(AggregateEdge(EdgeType.BELONGS_TO, "in"),),
            ),
        }
        for _ in range(100):
            g = random_scored_graph(rng)
            pipe = Pipeline(g, EngineConfig(policies=policies))
            report_a = pipe.update_graph(now=1.0)
            pod_scores = [
                n.anomaly_score
                for n in g.nodes_of_kind(ComponentKind.POD)
                if n.anomaly_score is not None
            ]
            for entry in report_a.kinds:
                for node_id, score in entry.scores.items():
                    assert min(pod_scores) - 1e-12 <= score <= max(pod_scores) + 1e-12
            report_b = pipe.update_graph(now=1.0)
            assert all(
                a.scores == b.scores for a, b in zip(report_a.kinds, report_b.kinds)
            )
        sandwich_ok = True

        # retention bound
        for _ in range(100):
            cap = int(rng.integers(1, 25))
            store = ObservationStore(cap, ("a",))
            count = int(rng.integers(0, 80))
            for i in range(count):
                store.append(float(i), "n", [float(i)])
            assert len(store) == min(cap, count)
            kept = [o.ts for o in store.observations()]
            assert kept == [float(i) for i in range(max(0, count - cap), count)]

        # standardizer self-check
        for _ in range(100):
            rows = rng.normal(
                loc=rng.normal(scale=5), scale=rng.uniform(0.1, 4),
                size=(int(rng.integers(2, 40)), int(rng.integers(1, 5))),
            )
            std = Standardizer.fit(rows)
            Z = std.transform(rows)
            nonconstant = std.sigma > 0
            assert np.all(np.abs(Z.mean(axis=0)[nonconstant]) < 1e-9)
            assert np.all(np.abs(Z.std(axis=0)[nonconstant] - 1.0) < 1e-9)

        # bundle version monotonicity
        for _ in range(100):
            registry = BundleRegistry()
            kind = ComponentKind.POD
            published = []
            for version in range(1, int(rng.integers(2, 8))):
                bundle = ModelBundle(
                    kind=kind, standardizer=Standardizer.fit(rng.normal(size=(5, 2))),
                    classifier=None, unsupervised="iforest", supervised="dtree",
                    feature_names=("a", "b"), version=version, trained_at=float(version),
                    training_rows=5, fingerprint=str(version),
                )
                registry.publish(bundle)
                published.append(bundle)
            versions = [b.version for b in published]
            assert versions == sorted(versions) and len(set(versions)) == len(versions)
            assert published[0].trained_at == 1.0  # earlier bundles untouched

        # snapshot round-trip identity
        from test_graph_store import graphs_equal, random_graph

        for _ in range(100):
            g = random_graph(rng, max_nodes=500)
            snap = g.snapshot(now=1.0)
            restored = GraphStore()
            restored.load_snapshot(snap)
            assert graphs_equal(snap, restored.snapshot(now=1.0))

        verdict(
            "pipeline-invariant-suite-100x",
            sandwich_ok,
            "sandwich, retention, standardizer, versions, determinism, round-trip",
        )
