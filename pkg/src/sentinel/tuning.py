"""Seeded random-search hyperparameter tuning and benchmark reporting.

Each trial draws an independent uniform sample from the search space
(log-uniform where declared), runs the model-specific objective, and
records the objective value plus fit/predict wall times. Unsupervised
models maximize the silhouette of their normal/anomalous partition;
supervised models maximize F1 on a stratified held-out split.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .errors import DegenerateGrouping, EmptyTrials
from .metrics import confusion_counts, f1_score, pairwise_distances, silhouette_score
from .models import (
    DbscanParams,
    DecisionTreeParams,
    FeatureMatrix,
    IsolationForestParams,
    LabeledDataset,
    LogRegParams,
    OcsvmParams,
    SvmParams,
    dbscan_label,
    dtree_fit,
    iforest_fit,
    logreg_fit,
    ocsvm_fit,
    svm_fit,
)

UNSUPERVISED_MODELS = ("iforest", "dbscan", "ocsvm")
SUPERVISED_MODELS = ("dtree", "logreg", "svm")


# -- search space ------------------------------------------------------


@dataclass(frozen=True)
class Categorical:
    values: tuple

    def sample(self, rng):
        return self.values[int(rng.integers(len(self.values)))]


@dataclass(frozen=True)
class IntRange:
    lo: int
    hi: int  # inclusive

    def sample(self, rng):
        return int(rng.integers(self.lo, self.hi + 1))


@dataclass(frozen=True)
class FloatRange:
    lo: float
    hi: float
    log: bool = False

    def sample(self, rng):
        if self.log:
            return float(np.exp(rng.uniform(np.log(self.lo), np.log(self.hi))))
        return float(rng.uniform(self.lo, self.hi))


Domain = Union[Categorical, IntRange, FloatRange]


@dataclass(frozen=True)
class SearchSpace:
    params: dict[str, Domain]

    def __post_init__(self):
        for name, dom in self.params.items():
            if isinstance(dom, Categorical) and not dom.values:
                raise ValueError(f"empty categorical domain for {name!r}")
            if isinstance(dom, IntRange) and dom.lo > dom.hi:
                raise ValueError(f"empty integer domain for {name!r}")
            if isinstance(dom, FloatRange) and not (dom.lo <= dom.hi):
                raise ValueError(f"empty float domain for {name!r}")

    def sample(self, rng) -> dict:
        return {name: dom.sample(rng) for name, dom in sorted(self.params.items())}


# -- trials ------------------------------------------------------------


@dataclass
class TrialRecord:
    trial_index: int
    params: dict
    objective: Optional[float]
    fit_time: float = 0.0
    predict_time: float = 0.0
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.objective is not None and np.isfinite(self.objective)


@dataclass
class SearchResult:
    trials: list[TrialRecord] = field(default_factory=list)

    @property
    def successful(self) -> list[TrialRecord]:
        return [t for t in self.trials if t.ok]

    @property
    def best(self) -> Optional[TrialRecord]:
        good = self.successful
        if not good:
            return None
        return max(good, key=lambda t: (t.objective, -t.trial_index))


def random_search(
    space: SearchSpace,
    objective: Callable[[dict], TrialRecord],
    n_trials: int = 50,
    seed: int = 0,
) -> SearchResult:
    rng = np.random.default_rng(seed)
    result = SearchResult()
    for i in range(n_trials):
        params = space.sample(rng)
        try:
            rec = objective(params)
            rec.trial_index = i
            if rec.objective is not None and not np.isfinite(rec.objective):
                rec = TrialRecord(i, params, None, rec.fit_time, rec.predict_time,
                                  error="non-finite objective")
        except Exception as exc:  # noqa: BLE001 - failed trials are data
            rec = TrialRecord(i, params, None, error=f"{type(exc).__name__}: {exc}")
        result.trials.append(rec)
    return result


def trial_table_csv(trials: list[TrialRecord]) -> str:
    lines = ["trial,params_json,objective,fit_time_s,predict_time_s"]
    for t in trials:
        obj = "" if t.objective is None else f"{t.objective:.6f}"
        params = json.dumps(t.params, sort_keys=True).replace('"', '""')
        lines.append(f'{t.trial_index},"{params}",{obj},{t.fit_time:.6f},{t.predict_time:.6f}')
    return "\n".join(lines) + "\n"


# -- default spaces ----------------------------------------------------

def default_space(model: str) -> SearchSpace:
    """Benchmark-scale spaces; centered on the best regions reported for
    the production dataset but widened so they stay meaningful on small
    synthetic data (and finish inside a desk-scale time budget)."""
    if model == "iforest":
        return SearchSpace({
            "n_estimators": IntRange(50, 150),
            "max_samples": FloatRange(0.5, 1.0),
            "max_features": FloatRange(0.6, 1.0),
            "bootstrap": Categorical((True, False)),
            "contamination": FloatRange(0.005, 0.05, log=True),
            "rng_seed": IntRange(0, 2**31 - 1),
        })
    if model == "dbscan":
        return SearchSpace({
            "eps": FloatRange(0.3, 2.5),
            "min_samples": IntRange(1, 8),
        })
    if model == "ocsvm":
        return SearchSpace({
            "nu": FloatRange(0.01, 0.5, log=True),
            "learning_rate": FloatRange(0.02, 0.2, log=True),
            "rng_seed": IntRange(0, 2**31 - 1),
        })
    if model == "dtree":
        return SearchSpace({
            "criterion": Categorical(("gini", "entropy")),
            "splitter": Categorical(("best", "random")),
            "max_depth": IntRange(5, 35),
            "max_features": FloatRange(0.6, 1.0),
            "min_samples_leaf": IntRange(1, 20),
            "min_samples_split": IntRange(2, 40),
            "rng_seed": IntRange(0, 2**31 - 1),
        })
    if model == "logreg":
        return SearchSpace({
            "penalty": Categorical(("l1", "l2")),
            "C": FloatRange(0.01, 100.0, log=True),
        })
    if model == "svm":
        return SearchSpace({
            "kernel": Categorical(("linear", "rbf")),
            "C": FloatRange(0.4, 0.85),
            "gamma": FloatRange(0.05, 4.5, log=True),
            "rng_seed": IntRange(0, 2**31 - 1),
        })
    raise ValueError(f"unknown model {model!r}")


# -- objectives --------------------------------------------------------


def _unsupervised_labeling(model: str, X: FeatureMatrix, params: dict):
    if model == "iforest":
        m = iforest_fit(X, IsolationForestParams(**params))
        return lambda: m.label(X)
    if model == "dbscan":
        return lambda: dbscan_label(X, DbscanParams(**params))
    if model == "ocsvm":
        m = ocsvm_fit(X, OcsvmParams(**params))
        return lambda: m.label(X)
    raise ValueError(f"unknown unsupervised model {model!r}")


def tune_unsupervised(
    model: str,
    X: FeatureMatrix,
    n_trials: int = 50,
    seed: int = 0,
    space: Optional[SearchSpace] = None,
    grouping: str = "binary",
) -> SearchResult:
    """Maximize the silhouette of the model's anomaly partition.

    grouping="binary" scores the normal/anomalous split; "clusters"
    scores the full cluster assignment (density models only).
    """
    space = space or default_space(model)
    distances = pairwise_distances(X.rows)

    def objective(params: dict) -> TrialRecord:
        t0 = time.perf_counter()
        label_fn = _unsupervised_labeling(model, X, params)
        t1 = time.perf_counter()
        labeling = label_fn()
        t2 = time.perf_counter()
        if grouping == "clusters" and labeling.clusters is not None:
            assignment = labeling.clusters
        else:
            assignment = labeling.labels.astype(int)
        if np.unique(assignment).size < 2:
            raise DegenerateGrouping("partition has a single group")
        value = silhouette_score(X, assignment, distances=distances)
        return TrialRecord(-1, params, value, fit_time=t1 - t0, predict_time=t2 - t1)

    return random_search(space, objective, n_trials=n_trials, seed=seed)


def stratified_split(
    y: np.ndarray, test_fraction: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Per-class shuffled split; every nonempty class keeps at least one
    sample on each side when it has two or more."""
    y = np.asarray(y, dtype=bool)
    rng = np.random.default_rng(seed)
    test = []
    for cls in (False, True):
        members = rng.permutation(np.flatnonzero(y == cls))
        if members.size == 0:
            continue
        k = int(round(test_fraction * members.size))
        k = min(max(k, 1 if members.size > 1 else 0), members.size - 1)
        test.append(members[:k])
    test_idx = np.sort(np.concatenate(test)) if test else np.empty(0, dtype=np.int64)
    train_idx = np.setdiff1d(np.arange(y.size), test_idx)
    return train_idx, test_idx


def tune_supervised(
    model: str,
    X: FeatureMatrix,
    y: np.ndarray,
    n_trials: int = 50,
    seed: int = 0,
    space: Optional[SearchSpace] = None,
    test_fraction: float = 0.2,
) -> SearchResult:
    """Maximize test-set F1 on a stratified held-out split."""
    space = space or default_space(model)
    y = np.asarray(y, dtype=bool)
    train_idx, test_idx = stratified_split(y, test_fraction, seed)
    X_train = FeatureMatrix(X.rows[train_idx], X.feature_names)
    X_test = FeatureMatrix(X.rows[test_idx], X.feature_names)
    train = LabeledDataset(X_train, y[train_idx])
    y_test = y[test_idx]

    fitters = {
        "dtree": lambda p: dtree_fit(train, DecisionTreeParams(**p)),
        "logreg": lambda p: logreg_fit(train, LogRegParams(**p)),
        "svm": lambda p: svm_fit(train, SvmParams(**p)),
    }
    if model not in fitters:
        raise ValueError(f"unknown supervised model {model!r}")

    def objective(params: dict) -> TrialRecord:
        t0 = time.perf_counter()
        fitted = fitters[model](params)
        t1 = time.perf_counter()
        predicted = fitted.predict_proba(X_test) > 0.5
        t2 = time.perf_counter()
        value = f1_score(confusion_counts(predicted, y_test))
        return TrialRecord(-1, params, value, fit_time=t1 - t0, predict_time=t2 - t1)

    return random_search(space, objective, n_trials=n_trials, seed=seed)


# -- reporting ---------------------------------------------------------


@dataclass(frozen=True)
class ReportRow:
    model: str
    best_objective: float
    fit_time: float
    predict_time: float


def benchmark_report(results: dict[str, SearchResult]) -> list[ReportRow]:
    rows = []
    for model, result in results.items():
        best = result.best
        if best is None:
            raise EmptyTrials(f"no successful trials for {model!r}")
        rows.append(ReportRow(model, best.objective, best.fit_time, best.predict_time))
    return rows


def report_text(rows: list[ReportRow], objective_name: str = "Best Objective") -> str:
    if not rows:
        raise EmptyTrials("no rows to report")
    header = f"{'Model':<20} {objective_name:<18} {'Fit Time (s)':<14} {'Pred. Time (s)':<14}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.model:<20} {r.best_objective:<18.4f} {r.fit_time:<14.4f} {r.predict_time:<14.4f}"
        )
    return "\n".join(lines) + "\n"
