"""Feasibility check for the frequency-distributor LP.

Solves ``find x >= 0 with A x (<=, >=, ==) b``. Small systems go through a
dense phase-one simplex with Bland's rule; equality rows with a single free
variable are fixed and substituted before the tableau is built. Systems whose
dense tableau would exceed ``DENSE_LIMIT`` cells are handed to HiGHS as the
equivalent elastic LP (minimize total row violation), which reports the same
residual as phase one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError
from .fdlp import EQ, GE, LE

TOL = 1e-7
DENSE_LIMIT = 1_500_000
FEASIBLE = "feasible"
INFEASIBLE = "infeasible"


@dataclass(frozen=True, eq=False)
class FeasibilityResult:
    status: str
    values: np.ndarray | None
    """Solution aligned with the LP's variable order, or None when infeasible."""
    artificial_objective: float
    iterations: int
    max_violation: float = 0.0
    keys: tuple = ()

    @property
    def feasible(self) -> bool:
        return self.status == FEASIBLE

    @property
    def solution(self) -> dict | None:
        if self.values is None:
            return None
        keys = self.keys or range(len(self.values))
        return dict(zip(keys, (float(v) for v in self.values)))


def _dense(n_vars, rows):
    m = len(rows)
    A = np.zeros((m, n_vars))
    b = np.empty(m)
    senses = []
    for r, (coeffs, sense, rhs) in enumerate(rows):
        items = coeffs.items() if isinstance(coeffs, dict) else coeffs
        for i, c in items:
            A[r, i] += c
        b[r] = rhs
        if sense not in (LE, GE, EQ):
            raise ValueError(f"unknown row sense {sense!r}")
        senses.append(sense)
    return A, b, np.array(senses, dtype=object)


def _violation(A, b, senses, x):
    """Largest amount by which x breaks a row or a bound."""
    lhs = A @ x if A.size else np.zeros(len(b))
    gap = lhs - b
    worst = 0.0
    if len(b):
        le = senses == LE
        ge = senses == GE
        eq = senses == EQ
        worst = max(
            float(np.max(np.where(le, gap, 0.0), initial=0.0)),
            float(np.max(np.where(ge, -gap, 0.0), initial=0.0)),
            float(np.max(np.where(eq, np.abs(gap), 0.0), initial=0.0)),
        )
    return max(worst, float(np.max(-x, initial=0.0)))


def _presolve(A, b, senses, tol):
    """Fix variables pinned by single-variable equality rows.

    Returns (fixed values with NaN for free variables, residual infeasibility).
    """
    n = A.shape[1]
    fixed = np.full(n, np.nan)
    rhs = b.copy()
    eq_rows = np.flatnonzero(senses == EQ)
    while True:
        free = np.isnan(fixed)
        nz = (A[eq_rows][:, free] != 0).sum(axis=1) if eq_rows.size else np.zeros(0, dtype=int)
        singles = eq_rows[nz == 1]
        if singles.size == 0:
            break
        changed = False
        for r in singles:
            cols = np.flatnonzero((A[r] != 0) & np.isnan(fixed))
            if cols.size != 1:
                continue
            j = cols[0]
            val = rhs[r] / A[r, j]
            if val < -tol:
                return fixed, -val
            val = max(val, 0.0)
            fixed[j] = val
            rhs -= A[:, j] * val
            changed = True
        if not changed:
            break
    return fixed, 0.0


def solve_feasibility(n_vars, rows, tol=TOL, max_iter=None, keys=()) -> FeasibilityResult:
    """Feasibility of ``rows`` over n_vars non-negative variables.

    ``rows`` holds (coefficients, sense, rhs) triples; coefficients may be a dict
    or a sequence of (index, value) pairs.
    """
    A, b, senses = _dense(n_vars, rows)
    fixed, bad = _presolve(A, b, senses, tol)
    if bad > 0:
        return FeasibilityResult(INFEASIBLE, None, bad, 0, keys=keys)

    free = np.flatnonzero(np.isnan(fixed))
    x = np.where(np.isnan(fixed), 0.0, fixed)
    rhs = b - A @ x
    sub = A[:, free]
    live = np.any(sub != 0, axis=1)

    # rows with nothing left to choose must already hold
    dead = ~live
    if np.any(dead):
        gap = _violation(np.zeros((int(dead.sum()), 0)), b[dead] - (A[dead] @ x), senses[dead], np.zeros(0))
        if gap > tol:
            return FeasibilityResult(INFEASIBLE, None, gap, 0, keys=keys)

    iterations = 0
    if free.size and np.any(live):
        values, art, iterations = _phase_one(sub[live], rhs[live], senses[live], tol, max_iter)
        if values is None:
            return FeasibilityResult(INFEASIBLE, None, art, iterations, keys=keys)
        x[free] = values
    else:
        art = 0.0

    return FeasibilityResult(
        FEASIBLE, x, art, iterations, max_violation=_violation(A, b, senses, x), keys=keys
    )


def _phase_one(A, b, senses, tol, max_iter):
    m, n = A.shape
    A = A.copy()
    b = b.copy()
    senses = senses.copy()
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1
    flip = {LE: GE, GE: LE, EQ: EQ}
    senses[neg] = [flip[s] for s in senses[neg]]

    n_aux = int(np.sum(senses != EQ))
    # columns: structural, then one slack (LE) or surplus (GE) per inequality row
    T = np.zeros((m, n + n_aux))
    T[:, :n] = A
    basis = np.full(m, -1, dtype=np.int64)  # -1 marks an artificial variable
    col = n
    aux_col = {}
    for r in range(m):
        if senses[r] == LE:
            T[r, col] = 1.0
            basis[r] = col
        elif senses[r] == GE:
            T[r, col] = -1.0
        else:
            continue
        aux_col[r] = col
        col += 1
    rhs = b.copy()

    art = basis < 0
    cost = -T[art].sum(axis=0)
    n_cols = T.shape[1]
    limit = max_iter if max_iter is not None else 50 * (m + n_cols + int(art.sum()))

    it = 0
    while True:
        candidates = np.flatnonzero(cost < -tol)
        if candidates.size == 0:
            break
        if it >= limit:
            raise SolverError(f"phase one exceeded {limit} iterations ({m} rows, {n_cols} columns)")
        j = int(candidates[0])
        colj = T[:, j]
        pos = np.flatnonzero(colj > tol)
        if pos.size == 0:
            # unbounded ray in phase one cannot happen: the artificial sum is bounded below
            raise SolverError("phase one found an unbounded direction")
        ratios = rhs[pos] / colj[pos]
        best = ratios.min()
        ties = pos[ratios <= best + 1e-12 * max(1.0, abs(best))]
        # Bland: among tied rows leave the smallest basic variable; artificials rank first
        r = int(min(ties, key=lambda i: (basis[i], i)))
        _pivot(T, rhs, cost, r, j)
        basis[r] = j
        it += 1

    artificial = float(rhs[basis < 0].sum())
    if artificial > tol:
        return None, artificial, it

    values = np.zeros(n)
    structural = basis >= 0
    # recompute basic values against the untouched matrix to shed pivoting drift
    B = np.zeros((m, m))
    orig = np.zeros((m, n_cols))
    orig[:, :n] = A
    for r, c in aux_col.items():
        orig[r, c] = 1.0 if senses[r] == LE else -1.0
    for i in range(m):
        if basis[i] >= 0:
            B[:, i] = orig[:, basis[i]]
        else:
            B[i, i] = 1.0
    try:
        xb = np.linalg.solve(B, b)
    except np.linalg.LinAlgError:
        xb = rhs
    if not np.all(np.isfinite(xb)) or np.max(np.abs(xb - rhs), initial=0.0) > 1e-6 * max(1.0, np.abs(rhs).max(initial=0.0)):
        xb = rhs
    for i in np.flatnonzero(structural):
        if basis[i] < n:
            values[basis[i]] = xb[i]
    values[(values < 0) & (values > -tol)] = 0.0
    return values + 0.0, artificial, it


def _pivot(T, rhs, cost, r, j):
    piv = T[r, j]
    T[r] /= piv
    rhs[r] /= piv
    colj = T[:, j].copy()
    colj[r] = 0.0
    nz = np.flatnonzero(colj)
    if nz.size:
        T[nz] -= np.outer(colj[nz], T[r])
        rhs[nz] -= colj[nz] * rhs[r]
        T[nz, j] = 0.0
    cj = cost[j]
    if cj != 0.0:
        cost -= cj * T[r]
        cost[j] = 0.0


def _sparse(n_vars, rows):
    from scipy import sparse

    data, ri, ci = [], [], []
    b = np.empty(len(rows))
    senses = []
    for r, (coeffs, sense, rhs) in enumerate(rows):
        items = coeffs.items() if isinstance(coeffs, dict) else coeffs
        for i, c in items:
            ri.append(r)
            ci.append(i)
            data.append(c)
        b[r] = rhs
        senses.append(sense)
    A = sparse.csr_matrix((data, (ri, ci)), shape=(len(rows), n_vars))
    return A, b, np.array(senses, dtype=object)


def solve_feasibility_highs(n_vars, rows, tol=TOL, keys=()) -> FeasibilityResult:
    """Elastic phase one via HiGHS: minimize the summed violation of every row.

    The elastic LP is always feasible, so the solver only has to optimize; an
    optimum above ``tol`` means the original rows are infeasible.
    """
    from scipy import sparse
    from scipy.optimize import linprog

    A, b, senses = _sparse(n_vars, rows)
    m = len(b)
    le = senses == LE
    ge = senses == GE
    eq = senses == EQ
    # one elastic column per inequality row, two per equality row
    cols = []
    for r in range(m):
        if le[r]:
            cols.append((r, -1.0))
        elif ge[r]:
            cols.append((r, 1.0))
        else:
            cols.append((r, 1.0))
            cols.append((r, -1.0))
    E = sparse.csr_matrix(
        ([c for _, c in cols], ([r for r, _ in cols], list(range(len(cols))))), shape=(m, len(cols))
    )
    full = sparse.hstack([A, E], format="csr")
    sign = np.where(ge, -1.0, 1.0)
    ub = ~eq
    cost = np.concatenate([np.zeros(n_vars), np.ones(len(cols))])
    res = linprog(
        cost,
        A_ub=sparse.diags(sign[ub]) @ full[ub] if ub.any() else None,
        b_ub=(sign * b)[ub] if ub.any() else None,
        A_eq=full[eq] if eq.any() else None,
        b_eq=b[eq] if eq.any() else None,
        bounds=(0, None),
        method="highs",
        options={"primal_feasibility_tolerance": 1e-9, "dual_feasibility_tolerance": 1e-9},
    )
    if res.status != 0:
        raise SolverError(f"HiGHS failed on the elastic LP: {res.message}")
    residual = float(res.fun)
    iters = int(getattr(res, "nit", 0))
    if residual > tol:
        return FeasibilityResult(INFEASIBLE, None, residual, iters, keys=keys)
    x = np.clip(res.x[:n_vars], 0.0, None)
    lhs = A @ x
    gap = lhs - b
    worst = max(
        float(np.max(gap[le], initial=0.0)),
        float(np.max(-gap[ge], initial=0.0)),
        float(np.max(np.abs(gap[eq]), initial=0.0)),
    )
    return FeasibilityResult(FEASIBLE, x, residual, iters, max_violation=worst, keys=keys)


def check_feasible(lp, tol=TOL, max_iter=None, backend="auto") -> FeasibilityResult:
    """Feasibility of a FrequencyDistributorLP.

    ``backend`` is "simplex", "highs", or "auto" (simplex unless the dense
    tableau would exceed DENSE_LIMIT cells).
    """
    rows = [(r.coeffs, r.sense, r.rhs) for r in lp.rows]
    if backend == "auto":
        backend = "simplex" if len(rows) * (lp.n_vars + len(rows)) <= DENSE_LIMIT else "highs"
    if backend == "highs":
        return solve_feasibility_highs(lp.n_vars, rows, tol=tol, keys=lp.variables)
    if backend != "simplex":
        raise ValueError(f"unknown backend {backend!r}")
    return solve_feasibility(lp.n_vars, rows, tol=tol, max_iter=max_iter, keys=lp.variables)
