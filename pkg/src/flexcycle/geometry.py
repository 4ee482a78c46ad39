"""Realizations in R^3 and the metric quantities read off them."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateError
from .skeleton import edge, sorted_edges, sorted_vertices

DEFAULT_NONDEGENERACY_TOL = 1e-9


class Realization(Mapping):
    """Immutable map ``vertex -> point in R^3``."""

    def __init__(self, coordinates):
        data = {}
        for v, p in dict(coordinates).items():
            arr = np.array(p, dtype=float).reshape(3)
            arr.setflags(write=False)
            data[v] = arr
        self._data = data
        self._order = tuple(sorted_vertices(data))

    def __getitem__(self, v):
        return self._data[v]

    def __iter__(self):
        return iter(self._order)

    def __len__(self):
        return len(self._data)

    def __repr__(self):
        return f"Realization({ {v: self._data[v].tolist() for v in self._order} })"

    @property
    def order(self) -> tuple:
        return self._order

    def array(self, order=None) -> np.ndarray:
        order = self._order if order is None else order
        return np.array([self._data[v] for v in order])

    @classmethod
    def from_array(cls, order, X) -> "Realization":
        X = np.asarray(X, dtype=float).reshape(len(order), 3)
        return cls({v: X[i] for i, v in enumerate(order)})

    def transformed(self, R, t=(0.0, 0.0, 0.0)) -> "Realization":
        """Apply ``x -> R x + t``."""
        R = np.asarray(R, dtype=float)
        t = np.asarray(t, dtype=float)
        return Realization({v: R @ p + t for v, p in self._data.items()})

    def distance(self, u, v) -> float:
        return float(np.linalg.norm(self._data[u] - self._data[v]))

    def distance_matrix(self, order=None) -> np.ndarray:
        X = self.array(order)
        diff = X[:, None, :] - X[None, :, :]
        return np.sqrt((diff**2).sum(axis=-1))


@dataclass(frozen=True)
class EdgeLengthMap(Mapping):
    lengths: dict = field(default_factory=dict)

    def __getitem__(self, e):
        return self.lengths[edge(*e)]

    def __iter__(self):
        return iter(sorted_edges(self.lengths))

    def __len__(self):
        return len(self.lengths)


def edge_length_map(G, rho: Realization) -> EdgeLengthMap:
    """Euclidean length of every edge of ``G`` (anything with ``.edges``)."""
    out = {}
    for e in sorted_edges(G.edges):
        d = rho.distance(*e)
        if d == 0.0:
            raise DegenerateError(f"degenerate edge {e}: endpoints coincide")
        out[e] = d
    return EdgeLengthMap(out)


def dihedral_angle(rho: Realization, e, a, b) -> float:
    """Unsigned angle in ``[0, pi]`` between the half-planes ``(e, a)`` and ``(e, b)``.

    Two coplanar triangles on opposite sides of ``e`` give ``pi``; folded
    onto each other they give ``0``.  For the regular tetrahedron this is the
    interior dihedral ``arccos(1/3)``.
    """
    p, q = rho[e[0]], rho[e[1]]
    axis = q - p
    L = np.linalg.norm(axis)
    if L == 0.0:
        raise DegenerateError(f"degenerate edge {tuple(e)}")
    axis = axis / L
    ua = rho[a] - p
    ub = rho[b] - p
    va = ua - (ua @ axis) * axis
    vb = ub - (ub @ axis) * axis
    scale = max(np.linalg.norm(ua), np.linalg.norm(ub), L)
    for name, vec in ((a, va), (b, vb)):
        if np.linalg.norm(vec) <= 1e-12 * scale:
            raise DegenerateError(f"degenerate face: triangle {tuple(e)}+{name} is collinear")
    return float(np.arctan2(np.linalg.norm(np.cross(va, vb)), va @ vb))


def face_pair_profile(rho: Realization, fA, fB) -> np.ndarray:
    """Sorted distances over distinct unordered pairs ``{u, v}``, ``u in fA, v in fB``."""
    pairs = {edge(u, v) for u in fA for v in fB if u != v}
    return np.sort([rho.distance(u, v) for u, v in pairs])


@dataclass(frozen=True)
class DegenerateFace:
    face: tuple
    area: float
    longest_side: float


def triangle_area(rho: Realization, face) -> tuple[float, float]:
    a, b, c = (rho[v] for v in face)
    area = 0.5 * float(np.linalg.norm(np.cross(b - a, c - a)))
    longest = max(np.linalg.norm(b - a), np.linalg.norm(c - b), np.linalg.norm(a - c))
    return area, float(longest)


def check_nondegenerate(T, rho: Realization, tol: float = DEFAULT_NONDEGENERACY_TOL) -> list:
    """Faces whose realized area is at most ``tol * longest_side**2``."""
    bad = []
    for f in T.faces:
        area, longest = triangle_area(rho, f)
        if area <= tol * longest**2:
            bad.append(DegenerateFace(tuple(f), area, longest))
    return bad


def canonical_pairs(vertices) -> list:
    vs = sorted_vertices(vertices)
    return [(vs[i], vs[j]) for i in range(len(vs)) for j in range(i + 1, len(vs))]
