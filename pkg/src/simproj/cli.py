"""Batch experiment runner and utilities.

Examples:
    simproj run-experiment --dataset wine --init pca --family linear \\
        --family kernel --runs 10 --out results/
    simproj time-fit --dataset wine --family linear --out results/
    simproj sweep-control-points --dataset wine --family linear --out results/
    simproj serve --port 8000
"""

import csv
import sys
import time
from pathlib import Path

import click
import numpy as np

from .datasets_io import load_registered, load_registry
from .experiments import (ExperimentPlan, make_init_layout, prepare_features,
                          run_experiment, run_scenario1_once, write_rows_csv,
                          write_summary_csv)
from .optimizer import write_loss_trace
from .scenarios import NeighborSpec, clone_fit, select_control_points


def _plan_from_options(**kw) -> ExperimentPlan:
    spec = NeighborSpec(k_original=kw.pop("k_original"),
                        k_visual=kw.pop("k_visual"))
    return ExperimentPlan(neighbor_spec=spec, **kw)


common_options = [
    click.option("--dataset", "datasets", multiple=True, required=True),
    click.option("--init", "inits", multiple=True, default=["pca"],
                 type=click.Choice(["pca", "force", "external"])),
    click.option("--family", "families", multiple=True,
                 default=["linear", "kernel"],
                 type=click.Choice(["linear", "kernel"])),
    click.option("--scenario", default=1, type=click.IntRange(1, 2)),
    click.option("--runs", default=10, type=click.IntRange(min=1)),
    click.option("--seed", "seeds", multiple=True, type=int,
                 help="explicit seed list; default 0..runs-1"),
    click.option("--iterations", default=500, type=click.IntRange(min=1)),
    click.option("--lr", "learning_rate", default=None, type=float,
                 help="default: 1e-3 linear, 1e-4 kernel"),
    click.option("--control-points", default=None, type=int),
    click.option("--k-original", default=10, type=int),
    click.option("--k-visual", default=5, type=int),
    click.option("--drag-class", "drag_class_id", default=4, type=int),
    click.option("--drag-delta", nargs=2, default=(10.0, 10.0), type=float),
    click.option("--registry", "registry_path", default=None,
                 type=click.Path(exists=True)),
    click.option("--out", "out_dir", default="results", type=click.Path()),
]


def with_common_options(command):
    for option in reversed(common_options):
        command = option(command)
    return command


def _build_plan(datasets, inits, families, scenario, runs, seeds, iterations,
                learning_rate, control_points, k_original, k_visual,
                drag_class_id, drag_delta, out_dir):
    return _plan_from_options(
        datasets=list(datasets), inits=list(inits), families=list(families),
        scenario=scenario, runs=runs, seeds=list(seeds) or None,
        iterations=iterations, learning_rate=learning_rate,
        control_points=control_points, k_original=k_original,
        k_visual=k_visual, drag_class_id=drag_class_id,
        drag_delta=tuple(drag_delta), out_dir=out_dir)


@click.group()
def main():
    """Interactive similarity projection experiments."""


@main.command("run-experiment")
@with_common_options
def run_experiment_cmd(registry_path, **kw):
    """Run the (dataset x init x family x seed) grid and write CSVs."""
    plan = _build_plan(**kw)
    registry = load_registry(registry_path) if registry_path else None
    rows, summary, failures = run_experiment(plan, registry)

    out = Path(plan.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_rows_csv(out / "runs.csv", rows)
    write_summary_csv(out / "summary.csv", summary)
    for entry in summary:
        click.echo(f"{entry['dataset']:12s} {entry['init']:8s} {entry['family']:6s} "
                   f"precision {entry.get('precision', '-'):>15s} "
                   f"silhouette {entry.get('silhouette', '-'):>15s} "
                   f"neighbor_error {entry.get('neighbor_error', '-'):>13s}")
    for failure in failures:
        click.echo(f"FAILED {failure}", err=True)
    sys.exit(1 if failures else 0)


@main.command("time-fit")
@with_common_options
def time_fit_cmd(registry_path, **kw):
    """Wall-clock timing of the clone fit and manipulation refit."""
    plan = _build_plan(**kw)
    registry = load_registry(registry_path) if registry_path else None
    rows, _, failures = run_experiment(plan, registry)

    out = Path(plan.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "timing.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=[
            "dataset", "init", "family", "seed", "clone_seconds", "fit_seconds"],
            extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    click.echo(f"wrote {out / 'timing.csv'} ({len(rows)} runs)")
    sys.exit(1 if failures else 0)


@main.command("sweep-control-points")
@with_common_options
@click.option("--multiples", default="1,2,3,4,5",
              help="comma-separated multiples of sqrt(N)")
def sweep_cmd(registry_path, multiples, **kw):
    """Precision versus control-point count, in multiples of sqrt(N)."""
    plan = _build_plan(**kw)
    registry = load_registry(registry_path) if registry_path else None
    out = Path(plan.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    rows = []
    for dataset_name in plan.datasets:
        ds = load_registered(dataset_name, registry)
        X = prepare_features(ds, plan.retained_fraction, plan.standardize)
        base = int(round(np.sqrt(len(X))))
        for multiple in [float(m) for m in multiples.split(",")]:
            count = min(len(X), max(2, int(round(base * multiple))))
            sub_plan = ExperimentPlan(
                datasets=[dataset_name], inits=plan.inits,
                families=plan.families, runs=plan.runs, seeds=plan.seeds,
                iterations=plan.iterations, learning_rate=plan.learning_rate,
                control_points=count, out_dir=plan.out_dir)
            for init_method in plan.inits:
                for family in plan.families:
                    for seed in plan.seeds:
                        result = run_scenario1_once(X, ds.labels, init_method,
                                                    family, seed, sub_plan)
                        rows.append(dict(dataset=dataset_name, init=init_method,
                                         family=family, multiple=multiple,
                                         control_points=count, seed=seed,
                                         precision=result["precision"]))
    write_rows_csv(out / "control_point_sweep.csv", rows)
    click.echo(f"wrote {out / 'control_point_sweep.csv'} ({len(rows)} rows)")


@main.command("clone")
@click.option("--dataset", required=True)
@click.option("--init", "init_method", default="pca",
              type=click.Choice(["pca", "force"]))
@click.option("--family", default="linear", type=click.Choice(["linear", "kernel"]))
@click.option("--iterations", default=500, type=int)
@click.option("--lr", "learning_rate", default=None, type=float)
@click.option("--seed", default=0, type=int)
@click.option("--registry", "registry_path", default=None, type=click.Path(exists=True))
@click.option("--out", "out_dir", default="results", type=click.Path())
def clone_cmd(dataset, init_method, family, iterations, learning_rate, seed,
              registry_path, out_dir):
    """Fit a projection cloning an initialization; write layout + loss trace."""
    from .experiments import DEFAULT_LEARNING_RATES
    from .init_projections import Layout2D, save_layout
    from .optimizer import OptimizerConfig

    registry = load_registry(registry_path) if registry_path else None
    ds = load_registered(dataset, registry)
    X = prepare_features(ds)
    init = make_init_layout(X, init_method, seed)
    config = OptimizerConfig(
        learning_rate=learning_rate or DEFAULT_LEARNING_RATES[family],
        iterations=iterations, seed=seed)
    start = time.perf_counter()
    model, trace = clone_fit(X, init, family, config)
    elapsed = time.perf_counter() - start

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    save_layout(out / f"{dataset}_{family}_layout.csv",
                Layout2D(coords=model.project(X), source="learned"))
    write_loss_trace(out / f"{dataset}_{family}_loss.csv", trace)
    click.echo(f"J: {trace[0]:.6f} -> {trace[-1]:.6f} in {elapsed:.2f}s")


@main.command("serve")
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
@click.option("--sessions-dir", default="sessions", type=click.Path())
@click.option("--registry", "registry_path", default=None, type=click.Path(exists=True))
@click.option("--static-dir", default=None, type=click.Path(),
              help="built web UI assets to serve at /")
def serve_cmd(host, port, sessions_dir, registry_path, static_dir):
    """Start the HTTP session service (and the web UI when built)."""
    import uvicorn

    from .service import create_app

    registry = load_registry(registry_path) if registry_path else None
    app = create_app(snapshot_dir=sessions_dir, registry=registry,
                     static_dir=static_dir)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
