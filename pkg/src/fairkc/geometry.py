"""Point storage and Euclidean distances."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError


def _as_matrix(points) -> np.ndarray:
    arr = np.array(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InputError(f"expected a non-empty 2-d array of coordinates, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError("coordinates must be finite")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PointSet:
    """Immutable (N, dim) array of float64 coordinates."""

    coords: np.ndarray

    def __init__(self, points):
        object.__setattr__(self, "coords", _as_matrix(points))

    @property
    def count(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]

    def __len__(self):
        return self.count

    def __getitem__(self, i):
        return self.coords[i]

    def subset(self, indices) -> "PointSet":
        return PointSet(self.coords[np.asarray(indices, dtype=np.int64)])

    def same_as(self, other: "PointSet") -> bool:
        return other is self or (
            self.coords.shape == other.coords.shape and np.array_equal(self.coords, other.coords)
        )


def _pairwise(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Single code path for every distance so scalar and matrix results agree bit for bit.
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))


def distance(a, b) -> float:
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise InputError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return float(_pairwise(a[None, :], b[None, :])[0, 0])


def distances_to(points: PointSet, target) -> np.ndarray:
    """Distances from every point to one target coordinate vector."""
    target = np.asarray(target, dtype=np.float64).reshape(1, -1)
    if target.shape[1] != points.dim:
        raise InputError(f"dimension mismatch: {points.dim} vs {target.shape[1]}")
    return _pairwise(points.coords, target)[:, 0]


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Client-by-center distances; ``max`` is cached at construction."""

    values: np.ndarray
    max: float

    @property
    def shape(self):
        return self.values.shape

    def __getitem__(self, key):
        return self.values[key]


# rows per block when building large matrices; keeps the (rows, k, dim) temporary bounded
_BLOCK = 8192


def distance_matrix(clients: PointSet, centers: PointSet) -> DistanceMatrix:
    if clients.dim != centers.dim:
        raise InputError(f"dimension mismatch: {clients.dim} vs {centers.dim}")
    n = clients.count
    out = np.empty((n, centers.count), dtype=np.float64)
    for start in range(0, n, _BLOCK):
        stop = min(start + _BLOCK, n)
        out[start:stop] = _pairwise(clients.coords[start:stop], centers.coords)
    out.setflags(write=False)
    return DistanceMatrix(values=out, max=float(out.max()))
