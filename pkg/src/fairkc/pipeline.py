"""Binary search on the radius with LP feasibility checks, then randomized rounding."""
from __future__ import annotations

import json
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import InfeasibleFairnessError, InputError, TimeLimitExceeded, UnreachableError
from .fairness import FairnessParams, GroupModel, ViolationReport, audit
from .fdlp import FrequencyDistributorLP, build_lp
from .geometry import PointSet, distance_matrix
from .greedy import CenterSet, greedy_k_center
from .joiners import FrequencyTable, build_frequency_table, mask_members
from .simplex import FeasibilityResult, check_feasible

_M64 = np.uint64(0xFFFFFFFFFFFFFFFF)


def _splitmix64(z: np.ndarray) -> np.ndarray:
    z = (z + np.uint64(0x9E3779B97F4A7C15)) & _M64
    z = ((z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)) & _M64
    z = ((z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)) & _M64
    return z ^ (z >> np.uint64(31))


def point_uniforms(seed: int, indices) -> np.ndarray:
    """One U[0, 1) draw per point, derived from (seed, point index) only.

    Each point gets its own counter-based stream, so the draw does not depend on
    how many other points there are or in which order they are processed.
    """
    idx = np.asarray(indices, dtype=np.uint64)
    key = _splitmix64(np.array([seed & 0xFFFFFFFFFFFFFFFF], dtype=np.uint64))[0]
    bits = _splitmix64(_splitmix64(key ^ idx))
    return (bits >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


@dataclass(frozen=True, eq=False)
class RoundingPlan:
    """Per-point cumulative assignment probabilities derived from an LP solution."""

    cumulative: np.ndarray
    """(N, k) row-wise cumulative probabilities over center positions."""
    n_points: int

    def draw(self, seed: int) -> np.ndarray:
        u = point_uniforms(seed, np.arange(self.n_points))
        labels = (u[:, None] >= self.cumulative).sum(axis=1)
        # u < 1 and the last column is 1, so labels < k; the guard covers rounding in cumsum
        return np.minimum(labels, self.cumulative.shape[1] - 1)


def rounding_plan(solution, table: FrequencyTable, k: int | None = None, tol=1e-6) -> RoundingPlan:
    """Turn x[c, S', j] into per-point probabilities x / |L(c, S')| over j in S'."""
    k = table.k if k is None else k
    probs_by_entry = np.zeros((len(table), k))
    for e, entry in enumerate(table):
        centers = mask_members(entry.mask)
        x = np.array([solution.get((entry.signature, entry.mask, j), 0.0) for j in centers], dtype=np.float64)
        p = x / entry.count
        if np.any(p < -tol) or abs(p.sum() - 1.0) > tol:
            raise InputError(
                f"LP solution does not distribute entry {entry.signature}/{entry.mask:#b}: "
                f"probabilities {p.tolist()}"
            )
        p = np.clip(p, 0.0, None)
        p /= p.sum()
        probs_by_entry[e, centers] = p
    cum = np.cumsum(probs_by_entry, axis=1)
    # pin the last reachable center of every entry to exactly 1
    last = np.array([max(mask_members(e.mask)) for e in table], dtype=np.int64)
    for e, j in enumerate(last):
        cum[e, j:] = 1.0
    return RoundingPlan(cumulative=cum[table.point_entry], n_points=table.n_points)


def randomized_assign(solution, table: FrequencyTable, seed: int, k: int | None = None) -> np.ndarray:
    """Independently send each point of L(c, S') to j in S' with probability x[c, S', j] / |L(c, S')|."""
    return rounding_plan(solution, table, k).draw(seed)


@dataclass
class SearchStep:
    l: float
    r: float
    lam: float
    reachable: bool
    feasible: bool


@dataclass
class SearchTrace:
    steps: list = field(default_factory=list)
    guard: SearchStep | None = None
    final_lambda: float | None = None

    @property
    def iterations(self) -> int:
        return len(self.steps)

    def to_dict(self) -> dict:
        return {
            "guard": asdict(self.guard) if self.guard else None,
            "steps": [asdict(s) for s in self.steps],
            "final_lambda": self.final_lambda,
            "iterations": self.iterations,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True, eq=False)
class Clustering:
    assignment: np.ndarray
    """Center position (0..k-1) for every client."""
    centers: CenterSet
    lam: float
    """Radius returned by the search."""
    radius: float
    """Largest distance from a client to its assigned center."""
    lp_solution: dict
    seed: int
    violation: ViolationReport
    table: FrequencyTable
    lp: FrequencyDistributorLP


@dataclass
class _Probe:
    table: FrequencyTable
    lp: FrequencyDistributorLP
    result: FeasibilityResult


def probe(clients, model, centers, dmat, params, lam) -> _Probe | None:
    """Build and solve the LP at one radius; None when some client is unreachable."""
    try:
        table = build_frequency_table(clients, model, centers, dmat, lam)
    except UnreachableError:
        return None
    lp = build_lp(table, params, model, dmat.shape[1])
    return _Probe(table, lp, check_feasible(lp))


@dataclass
class SearchResult:
    lam: float
    centers: CenterSet
    dmat: object
    probe: _Probe
    trace: SearchTrace


def search_radius(clients: PointSet, facilities: PointSet | None, k: int, params: FairnessParams,
                  model: GroupModel, epsilon: float, deadline: float | None = None,
                  centers: CenterSet | None = None) -> SearchResult:
    """Greedy seeding followed by bisection on lambda over [0, 2 max d]."""
    if not epsilon > 0:
        raise InputError(f"epsilon must be positive, got {epsilon}")
    if model.n_points != clients.count:
        raise InputError(f"group model has {model.n_points} points, got {clients.count} clients")
    params.check_groups(model)
    if centers is None:
        centers = greedy_k_center(clients, facilities, k)
    dmat = distance_matrix(clients, centers.as_points())
    trace = SearchTrace()

    l, r = 0.0, 2.0 * dmat.max
    # Bisection only makes sense if the widest radius is feasible; otherwise it would never stop.
    best = probe(clients, model, centers, dmat, params, r)
    trace.guard = SearchStep(l, r, r, best is not None, bool(best and best.result.feasible))
    if best is None or not best.result.feasible:
        raise InfeasibleFairnessError(
            "fairness constraints cannot be met even when every client may use every center"
        )

    feasible = False
    while r - l > epsilon or not feasible:
        if deadline is not None and time.monotonic() > deadline:
            trace.final_lambda = r
            raise TimeLimitExceeded("time limit exceeded during radius search", trace)
        lam = (l + r) / 2
        if not l < lam < r:
            # interval has collapsed to adjacent floats; r is feasible and cached
            lam, feasible = r, True
            break
        p = probe(clients, model, centers, dmat, params, lam)
        if p is None:
            trace.steps.append(SearchStep(l, r, lam, False, False))
            l, feasible = lam, False
            continue
        trace.steps.append(SearchStep(l, r, lam, True, p.result.feasible))
        if p.result.feasible:
            r, feasible, best = lam, True, p
        else:
            l, feasible = lam, False

    trace.final_lambda = r
    return SearchResult(lam=r, centers=centers, dmat=dmat, probe=best, trace=trace)


def cluster_from_search(search: SearchResult, model: GroupModel, params: FairnessParams, seed: int) -> Clustering:
    p = search.probe
    solution = p.result.solution
    labels = randomized_assign(solution, p.table, seed, search.centers.k)
    dist = search.dmat.values[np.arange(len(labels)), labels]
    return Clustering(
        assignment=labels,
        centers=search.centers,
        lam=search.lam,
        radius=float(dist.max()),
        lp_solution=solution,
        seed=seed,
        violation=audit(labels, model, params, search.centers.k),
        table=p.table,
        lp=p.lp,
    )


def fair_k_cluster(clients: PointSet, facilities: PointSet | None, k: int, params: FairnessParams,
                   model: GroupModel, epsilon: float, seed: int = 0, deadline: float | None = None,
                   centers: CenterSet | None = None):
    """Fair k-center clustering; returns (Clustering, SearchTrace).

    Pass ``facilities=None`` when centers are drawn from the clients themselves.
    Raises InfeasibleFairnessError when no radius admits a fair fractional assignment.
    """
    search = search_radius(clients, facilities, k, params, model, epsilon, deadline, centers)
    return cluster_from_search(search, model, params, seed), search.trace
