"""CSV ingestion and synthetic instance generation."""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import LoadError
from .fairness import GroupModel
from .geometry import PointSet

_BINARY = {"0", "1"}


def parse_group_spec(spec):
    """Split 'sex,race:cat,default:bin' into [(column, kind)], kind in {auto, cat, bin}."""
    if isinstance(spec, str):
        spec = [s for s in spec.split(",") if s.strip()]
    out = []
    for item in spec:
        name, _, kind = item.strip().partition(":")
        kind = kind or "auto"
        if kind not in ("auto", "cat", "bin"):
            raise LoadError(f"unknown group column kind {kind!r} in {item!r}")
        out.append((name, kind))
    return out


def load_dataset(path, group_cols, feature_cols=None, minmax=False):
    """Read a headed CSV into (PointSet, GroupModel).

    Group columns holding only 0/1 are indicators (one group each); any other
    group column is categorical and expands into one group per distinct value,
    named ``column=value``. Feature columns default to every non-group column.
    ``minmax`` rescales each feature to [0, 1]; off by default.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise LoadError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise LoadError(f"{path} is empty")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if r]
    if not body:
        raise LoadError(f"{path} has a header but no data rows")
    for n, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise LoadError(f"{path}:{n}: expected {len(header)} fields, found {len(r)}")

    col = {h: i for i, h in enumerate(header)}
    groups = parse_group_spec(group_cols)
    if not groups:
        raise LoadError("at least one group column is required")
    for name, _ in groups:
        if name not in col:
            raise LoadError(f"group column {name!r} not in header")
    group_names = {name for name, _ in groups}
    if feature_cols is None:
        features = [h for h in header if h not in group_names]
    else:
        features = [f.strip() for f in (feature_cols.split(",") if isinstance(feature_cols, str) else feature_cols)]
        for f in features:
            if f not in col:
                raise LoadError(f"feature column {f!r} not in header")
    if not features:
        raise LoadError("no feature columns")

    coords = np.empty((len(body), len(features)))
    for n, r in enumerate(body):
        for j, f in enumerate(features):
            try:
                coords[n, j] = float(r[col[f]])
            except ValueError:
                raise LoadError(f"{path}:{n + 2}: non-numeric value {r[col[f]]!r} in feature {f!r}") from None
    if not np.all(np.isfinite(coords)):
        raise LoadError(f"{path}: non-finite feature value")
    if minmax:
        lo = coords.min(axis=0)
        span = coords.max(axis=0) - lo
        coords = (coords - lo) / np.where(span > 0, span, 1.0)

    columns = []
    names = []
    for name, kind in groups:
        values = [r[col[name]].strip() for r in body]
        if kind == "bin" or (kind == "auto" and set(values) <= _BINARY):
            if not set(values) <= _BINARY:
                raise LoadError(f"indicator column {name!r} holds values other than 0/1")
            columns.append(np.array([v == "1" for v in values]))
            names.append(name)
        else:
            for v in sorted(set(values)):
                columns.append(np.array([x == v for x in values]))
                names.append(f"{name}={v}")
    membership = np.stack(columns, axis=1)
    empty = np.flatnonzero(~membership.any(axis=1))
    if empty.size:
        raise LoadError(f"{path}:{int(empty[0]) + 2}: point belongs to no group")
    return PointSet(coords), GroupModel(membership, tuple(names))


def write_dataset(path, points: PointSet, model: GroupModel):
    """Write features f0..f{d-1} plus one 0/1 column per group."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"f{j}" for j in range(points.dim)] + list(model.names))
        for x, g in zip(points.coords, model.membership):
            w.writerow([repr(float(v)) for v in x] + [int(b) for b in g])


def make_synthetic(n, n_groups=2, dim=2, n_blobs=None, mixing=1.0, overlap=0.0, spread=1.0, seed=0):
    """Gaussian blobs with group labels skewed per blob.

    Each blob draws its group proportions from a symmetric Dirichlet with
    concentration ``mixing`` (large = well mixed, small = segregated). With
    probability ``overlap`` a point also joins a second group.
    """
    rng = np.random.default_rng(seed)
    n_blobs = n_blobs or max(2, n_groups)
    centers = rng.uniform(-10, 10, size=(n_blobs, dim))
    blob = rng.integers(0, n_blobs, size=n)
    coords = centers[blob] + rng.normal(scale=spread, size=(n, dim))
    props = rng.dirichlet(np.full(n_groups, mixing), size=n_blobs)
    cum = np.cumsum(props, axis=1)[blob]
    first = np.minimum((rng.random(n)[:, None] >= cum).sum(axis=1), n_groups - 1)
    membership = np.zeros((n, n_groups), dtype=bool)
    membership[np.arange(n), first] = True
    if n_groups > 1 and overlap > 0:
        extra = np.flatnonzero(rng.random(n) < overlap)
        shift = rng.integers(1, n_groups, size=extra.size)
        membership[extra, (first[extra] + shift) % n_groups] = True
    return PointSet(coords), GroupModel(membership)
