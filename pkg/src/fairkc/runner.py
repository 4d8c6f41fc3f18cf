"""Run configuration, repeated runs, JSON reports and plot-data export."""
from __future__ import annotations

import csv
import io
import json
import math
import statistics
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .data import load_dataset
from .errors import InfeasibleFairnessError, InputError, TimeLimitExceeded
from .fairness import FairnessParams, GroupModel, audit, params_from_delta
from .fdlp import lp_stats
from .geometry import PointSet, distance_matrix
from .greedy import assign_nearest, greedy_k_center
from .pipeline import cluster_from_search, search_radius

SCHEMA_VERSION = 1
ALGORITHMS = ("fair", "greedy")
DEFAULT_TLE_SECONDS = 1800.0


@dataclass
class RunConfig:
    input: str | None = None
    k: int = 25
    epsilon: float = 0.1
    alpha: list | None = None
    beta: list | None = None
    delta: float | None = None
    algorithm: str = "fair"
    seed: int = 0
    repeats: int = 5
    output: str | None = None
    trace: bool = False
    tle_seconds: float = DEFAULT_TLE_SECONDS
    group_cols: str | list | None = None
    feature_cols: str | list | None = None
    minmax: bool = False
    facilities: str | None = None
    dataset: str | None = None
    """Label recorded in the report; defaults to the input file name."""

    def validate(self):
        if (self.alpha is None) == (self.delta is None):
            raise InputError("give either alpha (optionally with beta) or delta, not both or neither")
        if self.beta is not None and self.alpha is None:
            raise InputError("beta requires alpha")
        if self.repeats < 1:
            raise InputError("repeats must be at least 1")
        if self.k < 1:
            raise InputError("k must be positive")
        if not self.epsilon > 0:
            raise InputError("epsilon must be positive")
        if self.algorithm not in ALGORITHMS:
            raise InputError(f"algorithm must be one of {ALGORITHMS}")

    def params_for(self, model: GroupModel) -> FairnessParams:
        if self.delta is not None:
            return params_from_delta(model, self.delta)
        alpha = _expand(self.alpha, model.n_groups, "alpha")
        beta = _expand(self.beta if self.beta is not None else [0.0], model.n_groups, "beta")
        return FairnessParams(alpha, beta)


def _expand(values, n, name):
    values = [float(v) for v in values]
    if len(values) == 1:
        return values * n
    if len(values) != n:
        raise InputError(f"{name} has {len(values)} entries for {n} groups")
    return values


@dataclass
class RunReport:
    status: str
    algorithm: str
    dataset: str
    config: dict
    n_points: int
    n_groups: int
    k: int
    cost: float | None = None
    greedy_cost: float | None = None
    epsilon_violation: dict | None = None
    repeats: list = field(default_factory=list)
    clusters: list = field(default_factory=list)
    lp: dict | None = None
    group_names: list = field(default_factory=list)
    trace: dict | None = None
    message: str | None = None
    runtime_seconds: float = 0.0
    schema_version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, include_runtime=True) -> str:
        d = self.to_dict()
        if not include_runtime:
            d.pop("runtime_seconds")
        return json.dumps(d, sort_keys=True, indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls(**json.loads(text))


def _violation_summary(eps: list) -> dict:
    med = statistics.median(eps)
    mx = max(eps)
    return {
        "median": med,
        "max": mx,
        "median_ceil": math.ceil(med - 1e-9),
        "max_ceil": math.ceil(mx - 1e-9),
    }


def _composition(labels, model: GroupModel, k: int, centers) -> list:
    counts = np.zeros((k, model.n_groups), dtype=np.int64)
    np.add.at(counts, labels, model.membership.astype(np.int64))
    sizes = np.bincount(labels, minlength=k)
    return [
        {"center": int(centers[j]), "size": int(sizes[j]), "groups": [int(v) for v in counts[j]]}
        for j in range(k)
    ]


def run(config: RunConfig, data=None, facilities: PointSet | None = None) -> RunReport:
    """Execute ``config.repeats`` runs and aggregate them.

    The radius search is deterministic, so it runs once; each repeat redraws the
    randomized assignment with seed ``config.seed + rep``. ``data`` may supply an
    in-memory (PointSet, GroupModel) instead of ``config.input``.
    """
    config.validate()
    if data is None:
        if config.input is None:
            raise InputError("no input dataset")
        if config.group_cols is None:
            raise InputError("group columns are required to load a dataset")
        data = load_dataset(config.input, config.group_cols, config.feature_cols, config.minmax)
    points, model = data
    if facilities is None and config.facilities:
        facilities = PointSet(np.loadtxt(config.facilities, delimiter=",", skiprows=1, ndmin=2))
    params = config.params_for(model)
    dataset = config.dataset or (Path(config.input).name if config.input else "in-memory")
    report = RunReport(
        status="ok",
        algorithm=config.algorithm,
        dataset=dataset,
        config={
            "k": config.k, "epsilon": config.epsilon, "alpha": [float(a) for a in params.alpha],
            "beta": [float(b) for b in params.beta], "delta": config.delta, "seed": config.seed,
            "repeats": config.repeats, "minmax": config.minmax, "tle_seconds": config.tle_seconds,
            "facilities": config.facilities,
        },
        n_points=points.count,
        n_groups=model.n_groups,
        k=config.k,
        group_names=list(model.names),
    )

    start = time.monotonic()
    deadline = start + config.tle_seconds
    greedy = greedy_k_center(points, facilities, config.k)
    report.greedy_cost = greedy.radius
    if config.algorithm == "greedy":
        labels = assign_nearest(points, greedy)
        eps = audit(labels, model, params, greedy.k).epsilon
        report.cost = greedy.radius
        report.repeats = [{"seed": config.seed + rep, "epsilon": eps, "radius": greedy.radius}
                          for rep in range(config.repeats)]
        report.epsilon_violation = _violation_summary([eps] * config.repeats)
        report.clusters = _composition(labels, model, greedy.k, greedy.indices)
        report.runtime_seconds = time.monotonic() - start
        return report

    try:
        search = search_radius(points, facilities, config.k, params, model, config.epsilon,
                               deadline=deadline, centers=greedy)
    except InfeasibleFairnessError as exc:
        report.status = "N/A"
        report.message = str(exc)
        report.runtime_seconds = time.monotonic() - start
        return report
    except TimeLimitExceeded as exc:
        report.status = "TLE"
        report.message = str(exc)
        report.trace = exc.trace.to_dict() if exc.trace else None
        report.runtime_seconds = time.monotonic() - start
        return report

    report.cost = search.lam
    report.lp = {key: lp_stats(search.probe.lp)[key] for key in ("variables", "rows", "constraints")}
    if config.trace:
        report.trace = search.trace.to_dict()
    eps = []
    for rep in range(config.repeats):
        if time.monotonic() > deadline:
            report.status = "TLE"
            report.message = f"time limit exceeded after {rep} of {config.repeats} repeats"
            break
        clustering = cluster_from_search(search, model, params, config.seed + rep)
        eps.append(clustering.violation.epsilon)
        report.repeats.append({"seed": clustering.seed, "epsilon": clustering.violation.epsilon,
                               "radius": clustering.radius})
        if rep == 0:
            report.clusters = _composition(clustering.assignment, model, config.k, search.centers.indices)
            report.clustering = clustering  # not serialized; used for debug dumps
    if eps:
        report.epsilon_violation = _violation_summary(eps)
    report.runtime_seconds = time.monotonic() - start
    return report


SWEEP_METRICS = ("cost", "runtime_seconds", "epsilon_median")


def _sweep_value(report: RunReport, axis: str):
    if axis == "n_groups":
        return report.n_groups
    if axis == "k":
        return report.k
    if axis not in report.config:
        raise InputError(f"unknown sweep axis {axis!r}")
    return report.config[axis]


def emit_plot_data(reports, axis: str) -> str:
    """Tidy CSV with one row per (sweep value, metric)."""
    reports = list(reports)
    if not reports:
        raise InputError("no reports to export")
    datasets = {r.dataset for r in reports}
    if len(datasets) > 1:
        raise InputError(f"sweep mixes datasets: {sorted(datasets)}")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([axis, "metric", "value"])
    for r in reports:
        x = _sweep_value(r, axis)
        eps = r.epsilon_violation["median"] if r.epsilon_violation else None
        for metric, value in zip(SWEEP_METRICS, (r.cost, r.runtime_seconds, eps)):
            w.writerow([x, metric, "" if value is None else repr(float(value))])
    return buf.getvalue()
