"""Joiner decomposition of the clients for a fixed center set and radius.

A joiner is identified by an integer bitmask over center positions: bit j is
set when the point lies in the closed ball of radius lambda around center j.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from .errors import InputError, UnreachableError
from .fairness import GroupModel

MAX_CENTERS = 64


def mask_members(mask: int) -> list[int]:
    """Center positions present in a joiner mask, ascending."""
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return out


def format_mask(mask: int) -> str:
    """1-based set notation, e.g. 0b101 -> '{1,3}'."""
    return "{" + ",".join(str(j + 1) for j in mask_members(mask)) + "}"


def _check_k(k: int):
    if k > MAX_CENTERS:
        raise InputError(f"joiner masks support at most {MAX_CENTERS} centers, got {k}")


def point_masks(dvalues: np.ndarray, lam: float) -> np.ndarray:
    """uint64 joiner mask per row of a client-by-center distance array (closed balls)."""
    k = dvalues.shape[1]
    _check_k(k)
    weights = np.left_shift(np.uint64(1), np.arange(k, dtype=np.uint64))
    reach = dvalues <= lam
    return np.bitwise_or.reduce(np.where(reach, weights[None, :], np.uint64(0)), axis=1)


def joiner_of(index: int, centers, dmat, lam: float):
    """Joiner mask of one client, or None when no center is within lam."""
    if lam < 0:
        raise InputError("lambda must be non-negative")
    row = np.asarray(dmat[index], dtype=np.float64).reshape(1, -1)
    mask = int(point_masks(row, lam)[0])
    return mask or None


@dataclass(frozen=True)
class TableEntry:
    signature: tuple
    mask: int
    members: tuple

    @property
    def count(self) -> int:
        return len(self.members)

    @property
    def centers(self) -> list[int]:
        return mask_members(self.mask)


@dataclass(frozen=True, eq=False)
class FrequencyTable:
    """Points grouped by (signature, joiner), iterated in sorted key order."""

    entries: tuple
    lam: float
    k: int
    n_points: int
    point_entry: np.ndarray
    """Index into ``entries`` for every point."""

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def as_dict(self) -> dict:
        return {(e.signature, e.mask): e for e in self.entries}

    def counts(self) -> dict:
        return {(e.signature, e.mask): e.count for e in self.entries}

    @property
    def total(self) -> int:
        return sum(e.count for e in self.entries)

    def nonempty_joiners(self) -> set:
        return {e.mask for e in self.entries}

    def to_csv(self, group_names=None) -> str:
        """Debug dump with columns mask, signature, count."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["mask", "signature", "count"])
        for e in self.entries:
            sig = e.signature if group_names is None else tuple(group_names[a] for a in e.signature)
            w.writerow([format_mask(e.mask), "(" + ",".join(str(a) for a in sig) + ")", e.count])
        return buf.getvalue()


def build_frequency_table(clients, model: GroupModel, centers, dmat, lam: float) -> FrequencyTable:
    """Group clients by (signature, joiner) at radius lam.

    Raises UnreachableError when some client is farther than lam from every center.
    """
    if lam < 0:
        raise InputError("lambda must be non-negative")
    values = dmat.values if hasattr(dmat, "values") else np.asarray(dmat)
    n, k = values.shape
    if model.n_points != n:
        raise InputError(f"group model has {model.n_points} points, distance matrix has {n} rows")
    masks = point_masks(values, lam)
    lost = np.flatnonzero(masks == 0)
    if lost.size:
        raise UnreachableError(f"{lost.size} point(s) farther than {lam!r} from every center, e.g. {int(lost[0])}")

    # signature ids already follow sorted signature order, so sorting by (id, mask) gives sorted keys
    keys = np.stack([model.signature_ids.astype(np.uint64), masks], axis=1)
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).reshape(-1)
    order = np.argsort(inverse, kind="stable")
    bounds = np.searchsorted(inverse[order], np.arange(len(uniq) + 1))
    entries = tuple(
        TableEntry(
            signature=model.signatures[int(sid)],
            mask=int(mask),
            members=tuple(int(i) for i in order[bounds[e]:bounds[e + 1]]),
        )
        for e, (sid, mask) in enumerate(uniq)
    )
    inverse.setflags(write=False)
    return FrequencyTable(entries=entries, lam=float(lam), k=k, n_points=n, point_entry=inverse)


def table_from_counts(counts: dict, k: int, lam: float = float("nan")) -> FrequencyTable:
    """Table with synthetic member ids from {(signature, mask): count}; handy for hand-built tables."""
    entries = []
    start = 0
    for (sig, mask), c in sorted(counts.items()):
        if c <= 0 or mask <= 0 or mask >= (1 << k):
            raise InputError(f"bad table entry {(sig, mask, c)}")
        entries.append(TableEntry(signature=tuple(sig), mask=int(mask), members=tuple(range(start, start + c))))
        start += c
    point_entry = np.repeat(np.arange(len(entries)), [e.count for e in entries])
    return FrequencyTable(entries=tuple(entries), lam=lam, k=k, n_points=start, point_entry=point_entry)
