"""Batch experiment pipeline shared by the CLI and the acceptance suite:
preprocess, initialize, simulate a manipulation, run a scenario, score."""

import csv
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .datasets_io import LabeledDataset, load_registered
from .errors import RowCountMismatch
from .init_projections import Layout2D, force_scheme, load_external_layout, pca_2d
from .metrics import evaluate
from .optimizer import OptimizerConfig
from .preprocess import fit_pca, transform
from .scenarios import (NeighborSpec, drag_class, run_interpolation,
                        run_neighbor_learning, select_control_points,
                        simulate_center_manipulation, clone_fit)

DEFAULT_LEARNING_RATES = {"linear": 1e-3, "kernel": 1e-4}


@dataclass
class ExperimentPlan:
    datasets: list
    inits: list = field(default_factory=lambda: ["pca"])
    families: list = field(default_factory=lambda: ["linear", "kernel"])
    scenario: int = 1
    runs: int = 10
    seeds: list | None = None
    iterations: int = 500
    learning_rate: float | None = None          # None: per-family default
    control_points: int | None = None           # scenario 1; None: round(sqrt(N))
    spread: float = 0.05                        # simulated manipulation jitter
    drag_class_id: int = 4                      # scenario 2
    drag_delta: tuple = (10.0, 10.0)
    neighbor_spec: NeighborSpec = field(default_factory=NeighborSpec)
    retained_fraction: float = 0.9
    standardize: bool = False
    external_layouts: dict = field(default_factory=dict)  # dataset -> path
    out_dir: str = "results"

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.seeds is None:
            self.seeds = list(range(self.runs))

    def config_for(self, family: str, seed: int) -> OptimizerConfig:
        lr = self.learning_rate
        if lr is None:
            lr = DEFAULT_LEARNING_RATES[family]
        return OptimizerConfig(learning_rate=lr, iterations=self.iterations, seed=seed)


def prepare_features(ds: LabeledDataset, retained_fraction: float = 0.9,
                     standardize: bool = False) -> np.ndarray:
    reduction = fit_pca(ds.features, retained_fraction, scale=standardize)
    return transform(reduction, ds.features)


def make_init_layout(X, method: str, seed: int, external_path=None) -> Layout2D:
    if method == "pca":
        return pca_2d(X)
    if method == "force":
        return force_scheme(X, seed=seed)
    if method == "external":
        layout = load_external_layout(external_path)
        if len(layout) != X.shape[0]:
            raise RowCountMismatch(
                f"external layout has {len(layout)} rows, dataset has {X.shape[0]}")
        return layout
    raise ValueError(f"unknown init method {method!r}")


def run_scenario1_once(X, labels, init_method: str, family: str, seed: int,
                       plan: ExperimentPlan, external_path=None) -> dict:
    control = select_control_points(X, count=plan.control_points, seed=seed)
    if init_method == "external":
        init = make_init_layout(X, "external", seed, external_path)
        init = Layout2D(coords=init.coords[control.indices], source="external")
    else:
        init = make_init_layout(X[control.indices], init_method, seed)

    config = plan.config_for(family, seed)
    t0 = time.perf_counter()
    # the simulated user needs the fitted control layout; clone it first
    model, _ = clone_fit(X[control.indices], init, family, config)
    clone_time = time.perf_counter() - t0
    control_layout = Layout2D(coords=model.project(X[control.indices]), source="learned")
    manipulation = simulate_center_manipulation(control_layout, labels[control.indices],
                                                spread=plan.spread, seed=seed)
    # re-index the local moves back to dataset indices for run_interpolation
    moves = [(int(control.indices[i]), xy) for i, xy in manipulation.moves]
    manipulation = type(manipulation)(moves)

    t0 = time.perf_counter()
    _, layout, _ = run_interpolation(X, control, init, manipulation, family, config)
    total_time = time.perf_counter() - t0
    report = evaluate(layout, X, labels)
    return {
        "precision": report.nearest_centroid_precision,
        "silhouette": report.silhouette_scaled,
        "neighbor_error": report.neighbor_error_mean,
        "clone_seconds": clone_time,
        "fit_seconds": total_time,
    }


def run_scenario2_once(X, labels, init_method: str, family: str, seed: int,
                       plan: ExperimentPlan, external_path=None) -> dict:
    init = make_init_layout(X, init_method, seed, external_path)
    config = plan.config_for(family, seed)

    t0 = time.perf_counter()
    model, trace = clone_fit(X, init, family, config)
    clone_time = time.perf_counter() - t0
    before = Layout2D(coords=model.project(X), source="learned")
    before_report = evaluate(before, X, labels) if labels is not None else None

    manipulation = drag_class(before, labels, plan.drag_class_id,
                              np.asarray(plan.drag_delta, dtype=float)) \
        if labels is not None else None
    t0 = time.perf_counter()
    _, layout, _ = run_neighbor_learning(X, init, manipulation,
                                         plan.neighbor_spec, family, config)
    total_time = time.perf_counter() - t0
    after_report = evaluate(layout, X, labels) if labels is not None else None
    return {
        "precision_before": before_report.nearest_centroid_precision,
        "silhouette_before": before_report.silhouette_scaled,
        "precision": after_report.nearest_centroid_precision,
        "silhouette": after_report.silhouette_scaled,
        "neighbor_error": after_report.neighbor_error_mean,
        "clone_seconds": clone_time,
        "fit_seconds": total_time,
    }


TIMING_COLUMNS = ("clone_seconds", "fit_seconds")


def run_experiment(plan: ExperimentPlan, registry=None):
    """Execute every (dataset, init, family, seed) cell. Returns
    (rows, summary, failures)."""
    rows, failures = [], []
    for dataset_name in plan.datasets:
        ds = load_registered(dataset_name, registry)
        X = prepare_features(ds, plan.retained_fraction, plan.standardize)
        for init_method in plan.inits:
            external = plan.external_layouts.get(dataset_name)
            for family in plan.families:
                for seed in plan.seeds:
                    cell = dict(dataset=dataset_name, init=init_method,
                                family=family, scenario=plan.scenario, seed=seed)
                    try:
                        if plan.scenario == 1:
                            result = run_scenario1_once(X, ds.labels, init_method,
                                                        family, seed, plan, external)
                        else:
                            result = run_scenario2_once(X, ds.labels, init_method,
                                                        family, seed, plan, external)
                        rows.append({**cell, **result})
                    except Exception as exc:  # cell failure aborts the cell only
                        failures.append({**cell, "error": f"{type(exc).__name__}: {exc}"})
    summary = summarize(rows)
    return rows, summary, failures


def summarize(rows):
    """mean (std) per (dataset, init, family, metric), paper-table style."""
    groups = {}
    for row in rows:
        key = (row["dataset"], row["init"], row["family"])
        groups.setdefault(key, []).append(row)
    metric_names = ["precision", "silhouette", "neighbor_error"]
    summary = []
    for key in sorted(groups):
        bucket = groups[key]
        entry = dict(dataset=key[0], init=key[1], family=key[2], runs=len(bucket))
        for name in metric_names:
            values = [row[name] for row in bucket if name in row]
            if not values:
                continue
            mean = statistics.fmean(values)
            std = statistics.pstdev(values) if len(values) > 1 else 0.0
            entry[name] = f"{mean:.2f} ({std:.2f})"
            entry[f"{name}_mean"] = mean
            entry[f"{name}_std"] = std
        summary.append(entry)
    return summary


def write_rows_csv(path, rows, exclude_timing: bool = False):
    if not rows:
        Path(path).write_text("")
        return
    fields = [k for k in rows[0]
              if not (exclude_timing and k in TIMING_COLUMNS)]
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v) for k, v in row.items() if k in fields})


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.10g}"
    return value


def write_summary_csv(path, summary):
    fields = ["dataset", "init", "family", "runs",
              "precision", "silhouette", "neighbor_error"]
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore")
        writer.writeheader()
        for entry in summary:
            writer.writerow(entry)
