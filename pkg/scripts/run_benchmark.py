#!/usr/bin/env python3
"""Tune every model on the bundled synthetic benchmark and print the
summary tables (best objective, fit time, predict time per model)."""

import argparse
import time

from sentinel.datasets import make_benchmark
from sentinel.models import IsolationForestParams, iforest_fit
from sentinel.tuning import (
    benchmark_report,
    report_text,
    tune_supervised,
    tune_unsupervised,
)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trials", type=int, default=50)
    args = parser.parse_args()

    X, _ = make_benchmark(seed=args.seed)
    print(f"benchmark: n={X.n}, d={X.d}, seed={args.seed}, {args.trials} trials per model\n")

    started = time.perf_counter()
    unsupervised = {
        name: tune_unsupervised(name, X, n_trials=args.trials, seed=args.seed)
        for name in ("iforest", "dbscan", "ocsvm")
    }
    print(report_text(benchmark_report(unsupervised), objective_name="Best Silhouette"))

    labels = iforest_fit(
        X, IsolationForestParams(**unsupervised["iforest"].best.params)
    ).label(X).labels
    supervised = {
        name: tune_supervised(name, X, labels, n_trials=args.trials, seed=args.seed)
        for name in ("dtree", "logreg", "svm")
    }
    print(report_text(benchmark_report(supervised), objective_name="Best F1 Score"))
    print(f"total wall time: {time.perf_counter() - started:.1f}s")


if __name__ == "__main__":
    main()
