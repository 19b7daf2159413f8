#!/usr/bin/env python3
"""Run both fault-injection scenarios across a seed range and summarize."""

import argparse
import json

from sentinel.experiments import EXPERIMENT_KINDS, run_experiment


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seeds", type=int, default=5, help="number of seeds to sweep")
    parser.add_argument("--report-dir", default=None, help="write one JSON report per run")
    args = parser.parse_args()

    failures = 0
    for seed in range(args.seeds):
        for kind in EXPERIMENT_KINDS:
            report = run_experiment(kind, seed=seed)
            status = "PASS" if report["pass"] else "FAIL"
            failed = [c["name"] for c in report["checks"] if not c["passed"]]
            print(f"seed {seed:2d} {kind:8s} {status}" + (f"  {failed}" if failed else ""))
            failures += 0 if report["pass"] else 1
            if args.report_dir:
                path = f"{args.report_dir}/{kind}-seed{seed}.json"
                with open(path, "w", encoding="utf-8") as fh:
                    json.dump(report, fh, indent=2, sort_keys=True)
    print(f"\n{failures} failing runs")
    raise SystemExit(1 if failures else 0)


if __name__ == "__main__":
    main()
