"""Protected groups, fairness bounds and the additive-violation audit."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

Signature = tuple


@dataclass(frozen=True, eq=False)
class GroupModel:
    """Boolean (N, l) membership matrix plus derived signature data.

    Groups may overlap. Every point must belong to at least one group.
    """

    membership: np.ndarray
    names: tuple = ()
    signatures: tuple = field(init=False)
    """Distinct signatures in sorted order."""
    signature_ids: np.ndarray = field(init=False)
    """Per-point index into ``signatures``."""

    def __post_init__(self):
        m = np.array(self.membership, dtype=bool)
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
            raise InputError(f"membership must be a non-empty (N, l) matrix, got shape {m.shape}")
        empty = np.flatnonzero(~m.any(axis=1))
        if empty.size:
            raise InputError(f"point {int(empty[0])} belongs to no group")
        m.setflags(write=False)
        object.__setattr__(self, "membership", m)
        names = tuple(self.names) if self.names else tuple(f"g{i}" for i in range(m.shape[1]))
        if len(names) != m.shape[1]:
            raise InputError("one name per group required")
        object.__setattr__(self, "names", names)

        rows, inverse = np.unique(m, axis=0, return_inverse=True)
        sigs = [tuple(int(i) for i in np.flatnonzero(r)) for r in rows]
        order = sorted(range(len(sigs)), key=lambda i: sigs[i])
        rank = np.empty(len(sigs), dtype=np.int64)
        rank[order] = np.arange(len(sigs))
        ids = rank[np.asarray(inverse).reshape(-1)]
        ids.setflags(write=False)
        object.__setattr__(self, "signatures", tuple(sigs[i] for i in order))
        object.__setattr__(self, "signature_ids", ids)

    @classmethod
    def from_memberships(cls, groups, n_groups=None, names=()):
        """Build from an iterable of per-point group-index collections."""
        groups = [sorted(set(int(a) for a in g)) for g in groups]
        top = max((g[-1] for g in groups if g), default=-1)
        if n_groups is None:
            n_groups = top + 1
        if top >= n_groups or any(a < 0 for g in groups for a in g):
            raise InputError("group index out of range")
        m = np.zeros((len(groups), n_groups), dtype=bool)
        for i, g in enumerate(groups):
            m[i, g] = True
        return cls(m, names)

    @classmethod
    def from_labels(cls, labels, names=()):
        """Disjoint groups from one integer label per point."""
        labels = np.asarray(labels, dtype=np.int64)
        n_groups = int(labels.max()) + 1
        m = np.zeros((labels.size, n_groups), dtype=bool)
        m[np.arange(labels.size), labels] = True
        return cls(m, names)

    @property
    def n_points(self) -> int:
        return self.membership.shape[0]

    @property
    def n_groups(self) -> int:
        return self.membership.shape[1]

    @property
    def max_groups_per_point(self) -> int:
        return int(self.membership.sum(axis=1).max())

    @property
    def group_sizes(self) -> np.ndarray:
        return self.membership.sum(axis=0)

    @property
    def ratios(self) -> np.ndarray:
        return self.group_sizes / self.n_points


def signature_of(index: int, model: GroupModel) -> Signature:
    return model.signatures[model.signature_ids[index]]


@dataclass(frozen=True, eq=False)
class FairnessParams:
    """Per-group restricted-dominance caps (alpha) and minority-protection floors (beta)."""

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        a = np.array(self.alpha, dtype=np.float64).reshape(-1)
        b = np.array(self.beta, dtype=np.float64).reshape(-1)
        if a.shape != b.shape:
            raise InputError(f"alpha has {a.size} entries but beta has {b.size}")
        if np.any(b < 0) or np.any(a > 1) or np.any(b > a):
            raise InputError("need 0 <= beta_i <= alpha_i <= 1 for every group")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @classmethod
    def uniform(cls, n_groups, alpha, beta=0.0):
        return cls(np.full(n_groups, alpha), np.full(n_groups, beta))

    def check_groups(self, model: GroupModel):
        if self.alpha.size != model.n_groups:
            raise InputError(f"fairness bounds for {self.alpha.size} groups, model has {model.n_groups}")


def params_from_delta(model: GroupModel, delta: float) -> FairnessParams:
    """beta_i = r_i (1 - delta), alpha_i = min(1, r_i / (1 - delta))."""
    if not 0 <= delta < 1:
        raise InputError(f"delta must lie in [0, 1), got {delta}")
    r = model.ratios
    return FairnessParams(np.minimum(1.0, r / (1 - delta)), r * (1 - delta))


@dataclass(frozen=True, eq=False)
class ViolationReport:
    rd_excess: np.ndarray
    """(k, l) amount by which each group exceeds its cap in each cluster."""
    mp_excess: np.ndarray
    """(k, l) shortfall below each group's floor in each cluster."""
    counts: np.ndarray
    """(k, l) group members per cluster."""
    sizes: np.ndarray
    epsilon: float

    @property
    def feasible(self) -> bool:
        return self.epsilon == 0.0


def audit(assignment, model: GroupModel, params: FairnessParams, n_centers=None) -> ViolationReport:
    """Additive fairness violation of a point -> center-position assignment.

    Clusters with no points satisfy every constraint trivially.
    """
    labels = np.asarray(assignment, dtype=np.int64).reshape(-1)
    params.check_groups(model)
    if labels.size != model.n_points:
        raise InputError(f"assignment covers {labels.size} points, model has {model.n_points}")
    if labels.size and labels.min() < 0:
        raise InputError(f"point {int(np.argmin(labels))} is unassigned")
    k = int(labels.max()) + 1 if n_centers is None else int(n_centers)
    if labels.size and labels.max() >= k:
        raise InputError("assignment refers to a center outside range")

    counts = np.zeros((k, model.n_groups), dtype=np.int64)
    np.add.at(counts, labels, model.membership.astype(np.int64))
    sizes = np.bincount(labels, minlength=k)
    rd = np.maximum(0.0, counts - params.alpha[None, :] * sizes[:, None])
    mp = np.maximum(0.0, params.beta[None, :] * sizes[:, None] - counts)
    eps = float(max(rd.max(initial=0.0), mp.max(initial=0.0)))
    return ViolationReport(rd_excess=rd, mp_excess=mp, counts=counts, sizes=sizes, epsilon=eps)
