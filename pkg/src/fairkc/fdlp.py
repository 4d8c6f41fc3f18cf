"""The frequency-distributor LP built from a frequency table.

Variables x[c, S', j] say how many points of signature c in joiner S' go to
center j. Rows:

* fairness, per (group a, center j): an RD row ``sum_{a in c} x - alpha_a sum x <= 0``
  and an MP row ``sum_{a in c} x - beta_a sum x >= 0`` (omitted when beta_a == 0,
  since x >= 0 implies it);
* conservation, per table entry: ``sum_j x[c, S', j] = |L(c, S')|``.

Non-negativity is carried as variable bounds, not rows.
"""
from __future__ import annotations

from collections import namedtuple
from dataclasses import dataclass

from .fairness import FairnessParams, GroupModel
from .joiners import FrequencyTable, mask_members

VarKey = namedtuple("VarKey", "signature mask center")

LE, GE, EQ = "<=", ">=", "=="


@dataclass(frozen=True)
class Row:
    coeffs: tuple
    """((variable index, coefficient), ...) sorted by index."""
    sense: str
    rhs: float
    label: str = ""


@dataclass(frozen=True)
class FrequencyDistributorLP:
    variables: tuple
    rows: tuple
    k: int
    n_groups: int
    n_signatures: int
    n_points: int

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.variables)}

    def fairness_rows(self):
        return [r for r in self.rows if r.label.startswith(("RD", "MP"))]

    def conservation_rows(self):
        return [r for r in self.rows if r.label.startswith("L")]

    def to_text(self) -> str:
        return to_text(self)


def build_lp(table: FrequencyTable, params: FairnessParams, model: GroupModel, k: int) -> FrequencyDistributorLP:
    params.check_groups(model)
    variables = []
    conservation = []
    by_center = [[] for _ in range(k)]
    for entry in table:
        first = len(variables)
        for j in mask_members(entry.mask):
            if j >= k:
                raise ValueError(f"joiner {entry.mask:#b} names center {j} but k={k}")
            by_center[j].append((len(variables), entry.signature))
            variables.append(VarKey(entry.signature, entry.mask, j))
        coeffs = tuple((i, 1.0) for i in range(first, len(variables)))
        conservation.append(Row(coeffs, EQ, float(entry.count), f"L sig={entry.signature} mask={entry.mask}"))

    fairness = []
    for j in range(k):
        members = by_center[j]
        if not members:
            continue
        for a in range(model.n_groups):
            alpha = float(params.alpha[a])
            beta = float(params.beta[a])
            rd = tuple((i, (1.0 if a in sig else 0.0) - alpha) for i, sig in members)
            fairness.append(Row(rd, LE, 0.0, f"RD a={a} j={j}"))
            if beta > 0:
                mp = tuple((i, (1.0 if a in sig else 0.0) - beta) for i, sig in members)
                fairness.append(Row(mp, GE, 0.0, f"MP a={a} j={j}"))

    return FrequencyDistributorLP(
        variables=tuple(variables),
        rows=tuple(fairness + conservation),
        k=k,
        n_groups=model.n_groups,
        n_signatures=len({e.signature for e in table}) if len(table) else 0,
        n_points=table.n_points,
    )


def variable_bound(k: int, n_signatures: int, n_points: int) -> int:
    return min(2 ** (k - 1) * k * n_signatures, n_points * k)


def constraint_bound(k: int, n_groups: int, n_signatures: int, n_points: int) -> int:
    return k * n_groups + min(2 ** k * n_signatures, n_points * k) + variable_bound(k, n_signatures, n_points)


def lp_stats(lp: FrequencyDistributorLP) -> dict:
    """Sizes of an LP in the units used by the size bounds below.

    ``constraints`` counts one double-sided fairness constraint per (group, center),
    one conservation row per table entry and one bound per variable, whether or
    not the row was physically emitted.
    """
    n_cons = len(lp.conservation_rows())
    return {
        "variables": lp.n_vars,
        "rows": len(lp.rows),
        "conservation_rows": n_cons,
        "fairness_rows": len(lp.rows) - n_cons,
        "constraints": lp.k * lp.n_groups + n_cons + lp.n_vars,
        "variable_bound": variable_bound(lp.k, lp.n_signatures, lp.n_points),
        "constraint_bound": constraint_bound(lp.k, lp.n_groups, lp.n_signatures, lp.n_points),
    }


def to_text(lp: FrequencyDistributorLP) -> str:
    """Plain-text export: one line per variable and per row, sparse coefficients.

    Floats are written with repr() so the file parses back to identical values.
    """
    lines = [f"lp vars={lp.n_vars} rows={len(lp.rows)} k={lp.k} groups={lp.n_groups}"]
    for i, v in enumerate(lp.variables):
        sig = ",".join(str(a) for a in v.signature)
        lines.append(f"var {i} sig=({sig}) mask={v.mask} center={v.center}")
    for r in lp.rows:
        terms = " ".join(f"{i}:{c!r}" for i, c in r.coeffs)
        lines.append(f"row {r.sense} {r.rhs!r} | {terms} # {r.label}")
    return "\n".join(lines) + "\n"


def parse_text(text: str):
    """Inverse of to_text, returning (n_vars, [(coeffs dict, sense, rhs), ...])."""
    n_vars = 0
    rows = []
    for line in text.splitlines():
        if line.startswith("lp "):
            n_vars = int(line.split()[1].split("=")[1])
        elif line.startswith("row "):
            body = line.split(" # ", 1)[0]
            head, _, terms = body.partition(" | ")
            _, sense, rhs = head.split()
            coeffs = {}
            for t in terms.split():
                i, c = t.split(":")
                coeffs[int(i)] = float(c)
            rows.append((coeffs, sense, float(rhs)))
    return n_vars, rows
