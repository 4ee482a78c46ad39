r"""Flips of triangulations and the augmented graph of a flex.

Flipping edge ``{v1, v2}`` with opposite vertices ``u1, u2`` replaces the
triangles ``(v1, v2, u1)``, ``(v1, v2, u2)`` by ``(u1, u2, v1)``,
``(u1, u2, v2)`` and leaves every other face alone::

        v1                 v1
       /|\                /  \
     u1 | u2    --->    u1----u2
       \|/                \  /
        v2                 v2
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DegenerateError, FlipError
from .flex import DEFAULT_CONSTANCY_TOL, SampledFlex, constant_distance_pairs, relative_variation
from .geometry import dihedral_angle
from .skeleton import TriangularSkeleton, edge, sorted_edges


def quadrilateral(T: TriangularSkeleton, e) -> tuple:
    """``(v1, v2, u1, u2)`` for a flippable edge ``e = {v1, v2}``."""
    e = edge(*e)
    if e not in T.edges:
        raise FlipError(f"{e} is not an edge")
    idxs = T.edge_faces[e]
    if len(idxs) != 2:
        raise FlipError(f"{e} lies in {len(idxs)} face(s); a flip needs exactly two")
    u1, u2 = T.opposite_vertices(e)
    if u1 == u2:
        raise FlipError(f"both triangles at {e} share the opposite vertex {u1}")
    return e[0], e[1], u1, u2


def flip(T: TriangularSkeleton, e) -> TriangularSkeleton:
    """Replace edge ``e`` by the other diagonal of its quadrilateral."""
    v1, v2, u1, u2 = quadrilateral(T, e)
    if edge(u1, u2) in T.edges:
        raise FlipError(f"flip would create a doubled edge {edge(u1, u2)}")
    i, j = T.edge_faces[edge(v1, v2)]
    faces = list(T.faces)
    faces[i] = (u1, u2, v1)
    faces[j] = (u1, u2, v2)
    return TriangularSkeleton(T.vertices, tuple(faces))


def flip_sequence(T: TriangularSkeleton, edges) -> TriangularSkeleton:
    """Left fold of :func:`flip`; the empty sequence returns ``T``."""
    for k, e in enumerate(edges):
        try:
            T = flip(T, e)
        except FlipError as exc:
            raise FlipError(f"flip {k} on {tuple(e)} failed: {exc}") from exc
    return T


def check_independent(T: TriangularSkeleton, edges) -> list:
    """Edges of the set that are *not* a diagonal of a 4-cycle avoiding the set.

    For an independent set the flips commute, so the result of flipping all
    of them does not depend on the order.
    """
    chosen = {edge(*e) for e in edges}
    bad, new_edges = [], set()
    for e in sorted_edges(chosen):
        try:
            v1, v2, u1, u2 = quadrilateral(T, e)
        except FlipError:
            bad.append(e)
            continue
        sides = {edge(v1, u1), edge(u1, v2), edge(v2, u2), edge(u2, v1)}
        new = edge(u1, u2)
        if sides & chosen or new in T.edges or new in new_edges:
            bad.append(e)
        new_edges.add(new)
    return bad


def flip_all(T: TriangularSkeleton, edges) -> TriangularSkeleton:
    """Flip a set of pairwise independent edges (canonical order)."""
    bad = check_independent(T, edges)
    if bad:
        raise FlipError(f"edges are not independent: {bad}")
    return flip_sequence(T, sorted_edges({edge(*e) for e in edges}))


@dataclass(frozen=True)
class AugmentedGraph:
    vertices: tuple
    edges: frozenset
    extra: frozenset = frozenset()


def augmented_graph(T, flex: SampledFlex, tol: float = DEFAULT_CONSTANCY_TOL) -> AugmentedGraph:
    """``E`` together with every vertex pair at constant distance along ``flex``."""
    pairs = constant_distance_pairs(T.vertices, flex, tol)
    E = frozenset(T.edges)
    return AugmentedGraph(tuple(T.vertices), E | pairs, frozenset(pairs - E))


@dataclass
class FlipPropertyReport:
    realization: list = field(default_factory=list)
    flex: list = field(default_factory=list)
    constant_angle: list = field(default_factory=list)
    subgraph: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.realization or self.flex or self.constant_angle or self.subgraph)

    def failed_checks(self) -> list:
        names = ("realization", "flex", "constant_angle", "subgraph")
        labels = ("a", "b", "c", "d")
        return [lab for lab, n in zip(labels, names) if getattr(self, n)]


def verify_flip_properties(
    T: TriangularSkeleton,
    T_flipped: TriangularSkeleton,
    flex: SampledFlex,
    e_const,
    tol: float = DEFAULT_CONSTANCY_TOL,
    angle_tol: float = DEFAULT_CONSTANCY_TOL,
) -> FlipPropertyReport:
    """Check the four properties a flip along constant-angle edges must keep.

    (a) the initial sample realizes ``T_flipped``; (b) every sample induces
    the same lengths on its edges; (c) each ``e_const`` edge still present
    keeps a constant dihedral angle; (d) ``T_flipped`` is a subgraph of the
    augmented graph.
    """
    report = FlipPropertyReport()
    rho0 = flex.samples[0]
    for e in sorted_edges(T_flipped.edges):
        if rho0.distance(*e) == 0.0:
            report.realization.append(e)
    for e in sorted_edges(T_flipped.edges):
        if relative_variation([s.distance(*e) for s in flex.samples]) >= tol:
            report.flex.append(e)
    for e in sorted_edges({edge(*x) for x in e_const} & T_flipped.edges):
        idxs = T_flipped.edge_faces[e]
        if len(idxs) != 2:
            continue
        a, b = T_flipped.opposite_vertices(e)
        try:
            angles = [dihedral_angle(s, e, a, b) for s in flex.samples]
        except DegenerateError:
            report.constant_angle.append(e)
            continue
        if max(angles) - min(angles) >= angle_tol:
            report.constant_angle.append(e)
    aug = augmented_graph(T, flex, tol)
    report.subgraph.extend(sorted_edges(T_flipped.edges - aug.edges))
    return report
