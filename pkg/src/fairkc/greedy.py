"""Farthest-first greedy k-center and nearest-center assignment."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .geometry import PointSet, distance_matrix, distances_to


@dataclass(frozen=True, eq=False)
class CenterSet:
    indices: tuple
    """Indices into the facility set."""
    coords: np.ndarray
    radius: float

    @property
    def k(self) -> int:
        return len(self.indices)

    def as_points(self) -> PointSet:
        return PointSet(self.coords)

    def radius_for(self, clients: PointSet) -> float:
        return float(distance_matrix(clients, self.as_points()).values.min(axis=1).max())


def make_center_set(clients: PointSet, facilities: PointSet, indices) -> CenterSet:
    """Wrap explicit facility indices as a CenterSet, computing the induced radius."""
    indices = tuple(int(i) for i in indices)
    if not indices:
        raise InputError("need at least one center")
    if len(set(indices)) != len(indices):
        raise InputError(f"center indices must be distinct: {indices}")
    if min(indices) < 0 or max(indices) >= facilities.count:
        raise InputError("center index out of range")
    coords = facilities.coords[list(indices)]
    coords.setflags(write=False)
    radius = float(distance_matrix(clients, PointSet(coords)).values.min(axis=1).max())
    return CenterSet(indices=indices, coords=coords, radius=radius)


def greedy_k_center(clients: PointSet, facilities: PointSet | None, k: int) -> CenterSet:
    """Pick k centers by farthest-first traversal over the clients.

    The traversal always starts at client 0 and breaks ties toward the lowest
    index. When the facilities differ from the clients, each selected client is
    replaced by its nearest facility. If that facility is already open the
    traversal stops early (every client is then within its own distance to F of
    an open center) and the remaining slots are filled with the lowest-index
    unused facilities.
    """
    if facilities is None:
        facilities = clients
    if not isinstance(k, (int, np.integer)) or k <= 0:
        raise InputError(f"k must be a positive integer, got {k!r}")
    if k > facilities.count:
        raise InputError(f"k={k} exceeds the number of facilities ({facilities.count})")
    if clients.dim != facilities.dim:
        raise InputError(f"dimension mismatch: {clients.dim} vs {facilities.dim}")

    same = facilities.same_as(clients)
    chosen: list[int] = []
    nearest = np.full(clients.count, np.inf)
    u = 0
    while len(chosen) < k:
        if same:
            f = u
        else:
            f = int(np.argmin(distances_to(facilities, clients[u])))
        if f in chosen:
            break
        chosen.append(f)
        np.minimum(nearest, distances_to(clients, facilities[f]), out=nearest)
        u = int(np.argmax(nearest))

    if len(chosen) < k:
        taken = set(chosen)
        chosen.extend(i for i in range(facilities.count) if i not in taken)
        chosen = chosen[:k]
    return make_center_set(clients, facilities, chosen)


def assign_nearest(clients: PointSet, centers: CenterSet) -> np.ndarray:
    """Center position (0..k-1) of each client's nearest center, lowest position on ties."""
    if centers.k == 0:
        raise InputError("no centers")
    dmat = distance_matrix(clients, centers.as_points())
    return np.argmin(dmat.values, axis=1)
