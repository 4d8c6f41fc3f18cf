"""Brute-force reference solvers for tiny instances.

These are deliberately naive and share nothing with the LP pipeline beyond
the distance function: exhaustive center subsets, exhaustive assignments, and
exact rational vertex enumeration for LP feasibility.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import SizeError
from .fairness import FairnessParams, GroupModel
from .fdlp import EQ, GE, LE
from .geometry import PointSet, distance

MAX_FACILITIES = 12
MAX_FAIR_POINTS = 10
MAX_FAIR_K = 3


@dataclass(frozen=True)
class OracleResult:
    optimal_radius: float | None
    optimal_centers: tuple | None
    optimal_assignment: tuple | None
    """Center position per client, indexing ``optimal_centers``."""
    feasible: bool


def _dist_table(clients: PointSet, facilities: PointSet):
    return [[distance(c, f) for f in facilities.coords] for c in clients.coords]


def exact_classical(clients: PointSet, facilities: PointSet | None, k: int, reverse=False) -> OracleResult:
    """Optimal k-center radius by trying every k-subset of facilities."""
    facilities = clients if facilities is None else facilities
    if facilities.count > MAX_FACILITIES:
        raise SizeError(f"{facilities.count} facilities exceeds the brute-force limit of {MAX_FACILITIES}")
    if not 1 <= k <= facilities.count:
        raise SizeError(f"k={k} not in [1, {facilities.count}]")
    d = _dist_table(clients, facilities)
    subsets = list(itertools.combinations(range(facilities.count), k))
    if reverse:
        subsets.reverse()
    best = None
    for S in subsets:
        radius = max(min(row[f] for f in S) for row in d)
        if best is None or radius < best[0]:
            best = (radius, S)
    radius, S = best
    assignment = tuple(min(range(k), key=lambda p: (row[S[p]], p)) for row in d)
    return OracleResult(radius, S, assignment, True)


def _is_fair(counts, sizes, alpha, beta):
    for f, size in enumerate(sizes):
        for a, cnt in enumerate(counts[f]):
            if cnt > alpha[a] * size or cnt < beta[a] * size:
                return False
    return True


def _fair_assignment(options, groups, k, alpha, beta):
    """Depth-first search for a fair assignment given allowed centers per point.

    Memoizes failed (position, per-cluster tallies) states.
    """
    n = len(options)
    n_groups = len(alpha)
    failed = set()
    choice = [0] * n

    def rec(i, counts, sizes):
        if i == n:
            return _is_fair(counts, sizes, alpha, beta)
        state = (i, counts, sizes)
        if state in failed:
            return False
        for p in options[i]:
            row = list(counts[p])
            for a in groups[i]:
                row[a] += 1
            new_counts = counts[:p] + (tuple(row),) + counts[p + 1:]
            new_sizes = sizes[:p] + (sizes[p] + 1,) + sizes[p + 1:]
            choice[i] = p
            if rec(i + 1, new_counts, new_sizes):
                return True
        failed.add(state)
        return False

    empty = tuple((0,) * n_groups for _ in range(k))
    if rec(0, empty, (0,) * k):
        return tuple(choice)
    return None


def exact_fair(clients: PointSet, facilities: PointSet | None, k: int, params: FairnessParams,
               model: GroupModel) -> OracleResult:
    """Optimal radius of the fair k-center problem with zero violation.

    Every k-subset of facilities is tried; for each, candidate radii (the
    client-center distances) are scanned in increasing order until some
    assignment within that radius meets every RD and MP constraint exactly.
    """
    facilities = clients if facilities is None else facilities
    n = clients.count
    if n > MAX_FAIR_POINTS or k > MAX_FAIR_K or facilities.count > MAX_FACILITIES:
        raise SizeError(
            f"exact fair search limited to N<={MAX_FAIR_POINTS}, k<={MAX_FAIR_K}, "
            f"|F|<={MAX_FACILITIES}; got N={n}, k={k}, |F|={facilities.count}"
        )
    if not 1 <= k <= facilities.count:
        raise SizeError(f"k={k} not in [1, {facilities.count}]")
    params.check_groups(model)
    alpha = [Fraction(float(a)) for a in params.alpha]
    beta = [Fraction(float(b)) for b in params.beta]
    groups = [tuple(int(a) for a in np.flatnonzero(row)) for row in model.membership]
    d = _dist_table(clients, facilities)

    best = None
    for S in itertools.combinations(range(facilities.count), k):
        sub = [[row[f] for f in S] for row in d]
        floor = max(min(row) for row in sub)
        radii = sorted({v for row in sub for v in row if v >= floor})
        for lam in radii:
            if best is not None and lam >= best[0]:
                break
            options = [[p for p in range(k) if row[p] <= lam] for row in sub]
            found = _fair_assignment(options, groups, k, alpha, beta)
            if found is not None:
                radius = max(sub[i][p] for i, p in enumerate(found))
                best = (radius, S, found)
                break
    if best is None:
        return OracleResult(None, None, None, False)
    return OracleResult(best[0], best[1], best[2], True)


def _solve_exact(M, rhs):
    """Unique solution of a square rational system, or None if singular."""
    n = len(M)
    A = [list(row) + [r] for row, r in zip(M, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return None
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [v / p for v in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [A[r][n] for r in range(n)]


def _holds(lhs, sense, rhs):
    if sense == LE:
        return lhs <= rhs
    if sense == GE:
        return lhs >= rhs
    return lhs == rhs


def lp_feasible_exact(n_vars: int, rows) -> bool:
    """Exact feasibility of {x >= 0, rows} by enumerating vertices in rational arithmetic.

    The region lies in the non-negative orthant, so it is non-empty iff it has a
    vertex, i.e. iff some choice of n_vars tight constraints (rows or bounds
    x_i = 0) has a unique solution satisfying every constraint.
    """
    dense = []
    for coeffs, sense, rhs in rows:
        items = coeffs.items() if isinstance(coeffs, dict) else coeffs
        row = [Fraction(0)] * n_vars
        for i, c in items:
            row[i] += Fraction(c)
        dense.append((row, sense, Fraction(rhs)))

    def ok(x):
        if any(v < 0 for v in x):
            return False
        return all(_holds(sum((a * v for a, v in zip(row, x)), Fraction(0)), s, r) for row, s, r in dense)

    if n_vars == 0:
        return ok([])
    # equalities are tight at every vertex, so an independent subset of them is always chosen
    fixed = []
    for row, sense, r in dense:
        if sense == EQ and _rank([h[0] for h in fixed] + [row]) > len(fixed):
            fixed.append((row, r))
    free = [(row, r) for row, sense, r in dense if sense != EQ]
    for i in range(n_vars):
        unit = [Fraction(0)] * n_vars
        unit[i] = Fraction(1)
        free.append((unit, Fraction(0)))
    for combo in itertools.combinations(free, n_vars - len(fixed)):
        planes = fixed + list(combo)
        x = _solve_exact([h[0] for h in planes], [h[1] for h in planes])
        if x is not None and ok(x):
            return True
    return False


def _rank(rows) -> int:
    A = [list(r) for r in rows]
    rank = 0
    for col in range(len(A[0]) if A else 0):
        piv = next((r for r in range(rank, len(A)) if A[r][col] != 0), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for r in range(rank + 1, len(A)):
            if A[r][col] != 0:
                f = A[r][col] / A[rank][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[rank])]
        rank += 1
    return rank
