"""Operator entry points: run the engine, run experiments, tune models.

Exit codes: 0 success, 1 experiment/acceptance failure, 2 usage or
configuration error.
"""

from __future__ import annotations

import json
import sys

import click

from .config import EngineConfig, load_config
from .datasets import load_feature_csv, make_benchmark, save_feature_csv
from .errors import ConfigError, SentinelError
from .experiments import EXPERIMENT_KINDS, run_experiment
from .tuning import (
    SUPERVISED_MODELS,
    UNSUPERVISED_MODELS,
    report_text,
    trial_table_csv,
    tune_supervised,
    tune_unsupervised,
)


@click.group()
def main():
    """Cluster anomaly detection and prediction engine."""


@main.command()
@click.option("--config", "config_path", type=click.Path(), help="TOML config file.")
@click.option("--mode", type=click.Choice(["live", "simulate", "replay"]), default="simulate")
@click.option("--listen", default="127.0.0.1:8787", help="host:port for the HTTP API.")
@click.option("--replay-file", type=click.Path(), default=None)
@click.option("--static-dir", type=click.Path(), default=None,
              help="Serve the operator console from this directory.")
def run(config_path, mode, listen, replay_file, static_dir):
    """Start the scheduler and HTTP service."""
    import uvicorn

    from .api.runtime import EngineRuntime
    from .api.server import build_app

    if config_path:
        try:
            config = load_config(config_path)
        except FileNotFoundError:
            click.echo(f"config file not found: {config_path}", err=True)
            sys.exit(2)
        except ConfigError as exc:
            for field, message in exc.field_errors:
                click.echo(f"config error: {field}: {message}", err=True)
            sys.exit(2)
    else:
        config = EngineConfig()
    if mode == "replay" and not replay_file:
        click.echo("--mode replay requires --replay-file", err=True)
        sys.exit(2)

    try:
        runtime = EngineRuntime(config, mode=mode, replay_file=replay_file)
    except SentinelError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)

    if mode == "replay":
        runtime.replay_all()
        click.echo("replay complete; serving final graph state")
    else:
        runtime.start_scheduler()

    host, _, port = listen.rpartition(":")
    if not host or not port.isdigit():
        click.echo(f"--listen must be host:port, got {listen!r}", err=True)
        sys.exit(2)
    app = build_app(runtime, static_dir=static_dir)
    try:
        uvicorn.run(app, host=host, port=int(port), log_level="warning")
    finally:
        runtime.stop()


@main.command()
@click.argument("kind", type=click.Choice(list(EXPERIMENT_KINDS)))
@click.option("--report", "report_path", type=click.Path(), required=True)
@click.option("--seed", type=int, default=0)
@click.option("--baseline-ticks", type=int, default=20)
@click.option("--fault-ticks", type=int, default=10)
@click.option("--realtime", is_flag=True, help="Pace phases with the wall clock.")
def experiment(kind, report_path, seed, baseline_ticks, fault_ticks, realtime):
    """Run a fault-injection scenario and grade it."""
    report = run_experiment(
        kind,
        seed=seed,
        baseline_ticks=baseline_ticks,
        fault_ticks=fault_ticks,
        realtime=realtime,
    )
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for check in report["checks"]:
        marker = "PASS" if check["passed"] else "FAIL"
        click.echo(f"{marker} {check['name']}: value={check['value']} need {check['threshold']}")
    click.echo(f"report written to {report_path}")
    if not report["pass"]:
        sys.exit(1)


@main.command()
@click.option("--model", required=True)
@click.option("--trials", type=int, default=50)
@click.option("--data", "data_path", type=click.Path(), default=None,
              help="CSV feature matrix (header row; optional trailing 'label' column). "
                   "Defaults to the bundled synthetic benchmark.")
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--seed", type=int, default=0)
def tune(model, trials, data_path, out_path, seed):
    """Random-search hyperparameter tuning; writes the trial table."""
    known = UNSUPERVISED_MODELS + SUPERVISED_MODELS
    if model not in known:
        click.echo(f"unknown model {model!r}; valid: {', '.join(known)}", err=True)
        sys.exit(2)
    if data_path is None:
        X, labels = make_benchmark(seed=seed)
    else:
        try:
            X, labels = load_feature_csv(data_path)
        except (OSError, ValueError) as exc:
            click.echo(f"cannot read {data_path}: {exc}", err=True)
            sys.exit(2)

    if model in UNSUPERVISED_MODELS:
        result = tune_unsupervised(model, X, n_trials=trials, seed=seed)
        objective_name = "Best Silhouette"
    else:
        if labels is None:
            click.echo("supervised tuning needs a 'label' column in the data file", err=True)
            sys.exit(2)
        result = tune_supervised(model, X, labels, n_trials=trials, seed=seed)
        objective_name = "Best F1 Score"

    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(trial_table_csv(result.trials))
    best = result.best
    if best is None:
        click.echo("no successful trials", err=True)
        sys.exit(1)
    from .tuning import ReportRow

    click.echo(report_text([ReportRow(model, best.objective, best.fit_time, best.predict_time)],
                           objective_name=objective_name))
    click.echo(f"trial table written to {out_path}")


@main.command("make-benchmark")
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--seed", type=int, default=0)
@click.option("--with-labels", is_flag=True)
def make_benchmark_cmd(out_path, seed, with_labels):
    """Write the bundled synthetic benchmark to a CSV file."""
    X, truth = make_benchmark(seed=seed)
    save_feature_csv(out_path, X, labels=truth if with_labels else None)
    click.echo(f"wrote {X.n}x{X.d} benchmark to {out_path}")


if __name__ == "__main__":
    main()
