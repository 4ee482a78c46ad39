"""Combinatorial 2-skeletons of polyhedra and their fan triangulation.

A skeleton is stored as a vertex tuple and a *list* of faces, each face a
cyclic vertex sequence.  Edges are derived from the faces.  Vertex
identifiers are opaque hashables (ints or strings); they only need a total
order for deterministic output, see :func:`vertex_key`.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Sequence

from .errors import SkeletonError

Vertex = Hashable
Edge = tuple  # canonical (u, v) with vertex_key(u) < vertex_key(v)


def vertex_key(v):
    """Total order on mixed int/str identifiers: ints first, then strings."""
    if isinstance(v, bool):
        raise TypeError("booleans are not valid vertex identifiers")
    if isinstance(v, int):
        return (0, v, "")
    return (1, 0, str(v))


def edge(u, v) -> Edge:
    """Canonical unordered pair."""
    if vertex_key(u) <= vertex_key(v):
        return (u, v)
    return (v, u)


def sorted_vertices(vs: Iterable) -> list:
    return sorted(vs, key=vertex_key)


def sorted_edges(es: Iterable[Edge]) -> list:
    return sorted(es, key=lambda e: (vertex_key(e[0]), vertex_key(e[1])))


def face_edges(face: Sequence) -> list[Edge]:
    k = len(face)
    return [edge(face[i], face[(i + 1) % k]) for i in range(k)]


def canonical_face(face: Sequence) -> tuple:
    """Representative of a face cycle up to rotation and reversal."""
    face = tuple(face)
    k = len(face)
    if k == 0:
        return face
    best = None
    for seq in (face, face[::-1]):
        for i in range(k):
            rot = seq[i:] + seq[:i]
            key = tuple(vertex_key(v) for v in rot)
            if best is None or key < best[0]:
                best = (key, rot)
    return best[1]


@dataclass(frozen=True)
class Issue:
    kind: str
    item: tuple
    message: str


@dataclass
class ValidationReport:
    issues: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def __bool__(self):
        return self.ok

    def kinds(self) -> Counter:
        return Counter(i.kind for i in self.issues)


@dataclass(frozen=True, eq=False)
class Polyhedron2Skeleton:
    """A combinatorial polyhedron ``(V, E, F)``.

    Parameters
    ----------
    vertices : sequence
        Vertex identifiers.
    faces : sequence of sequences
        Cyclic vertex sequences.  Repeated (combinatorially equal) faces are
        allowed and counted with multiplicity.

    Construction does not validate; use :func:`validate_skeleton`.
    """

    vertices: tuple
    faces: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted_vertices(set(self.vertices))))
        object.__setattr__(self, "faces", tuple(tuple(f) for f in self.faces))

    @classmethod
    def from_faces(cls, faces, vertices=None):
        faces = [tuple(f) for f in faces]
        if vertices is None:
            vertices = {v for f in faces for v in f}
        return cls(tuple(vertices), tuple(faces))

    @cached_property
    def edges(self) -> frozenset:
        return frozenset(e for f in self.faces for e in face_edges(f) if e[0] != e[1])

    @cached_property
    def edge_faces(self) -> dict:
        """Map edge -> list of indices of faces containing it (with multiplicity)."""
        inc: dict = {}
        for idx, f in enumerate(self.faces):
            for e in set(face_edges(f)):
                inc.setdefault(e, []).append(idx)
        return inc

    @property
    def is_triangular(self) -> bool:
        return all(len(f) == 3 for f in self.faces)

    def canonical(self) -> tuple:
        """Hashable form independent of face order, rotation and reversal."""
        faces = sorted(
            (canonical_face(f) for f in self.faces),
            key=lambda f: tuple(vertex_key(v) for v in f),
        )
        return (self.vertices, tuple(faces))

    def __eq__(self, other):
        if not isinstance(other, Polyhedron2Skeleton):
            return NotImplemented
        return self.canonical() == other.canonical()

    def __hash__(self):
        return hash(self.canonical())

    def to_dict(self) -> dict:
        vertices, faces = self.canonical()
        return {"vertices": list(vertices), "faces": [list(f) for f in faces]}


class TriangularSkeleton(Polyhedron2Skeleton):
    """Skeleton whose faces are all triangles."""

    def __post_init__(self):
        super().__post_init__()
        bad = [f for f in self.faces if len(f) != 3]
        if bad:
            raise SkeletonError(f"non-triangular faces: {bad[:3]}")

    def opposite_vertices(self, e) -> tuple:
        """Third vertices of the faces containing edge ``e``."""
        e = edge(*e)
        idxs = self.edge_faces.get(e)
        if idxs is None:
            raise SkeletonError(f"{e} is not an edge")
        out = []
        for i in idxs:
            (w,) = [v for v in self.faces[i] if v not in e]
            out.append(w)
        return tuple(out)


def validate_skeleton(H: Polyhedron2Skeleton) -> ValidationReport:
    """List every violated 2-skeleton invariant; an empty report means valid."""
    report = ValidationReport()
    vset = set(H.vertices)
    for idx, f in enumerate(H.faces):
        if len(f) < 3:
            report.issues.append(Issue("short-face", (idx,), f"face {idx} {f} has fewer than 3 vertices"))
        if len(set(f)) != len(f):
            report.issues.append(Issue("repeated-vertex", (idx,), f"face {idx} {f} repeats a vertex"))
        unknown = [v for v in f if v not in vset]
        if unknown:
            report.issues.append(Issue("unknown-vertex", (idx,), f"face {idx} uses unknown vertices {unknown}"))
    for f in H.faces:
        for i in range(len(f)):
            if f[i] == f[(i + 1) % len(f)]:
                report.issues.append(Issue("degenerate-edge", (f[i], f[i]), f"edge endpoints coincide at {f[i]}"))
    for e in sorted_edges(H.edges):
        count = len(H.edge_faces[e])
        if count != 2:
            word = "one face" if count == 1 else f"{count} faces"
            report.issues.append(Issue("edge-face-count", e, f"edge {e} in exactly {word}, expected two"))
    return report


def as_triangular(H: Polyhedron2Skeleton) -> TriangularSkeleton:
    if isinstance(H, TriangularSkeleton):
        return H
    return TriangularSkeleton(H.vertices, H.faces)


def min_vertex_anchor(face: Sequence):
    return min(face, key=vertex_key)


def triangulate_fan(
    H: Polyhedron2Skeleton,
    anchor_rule: Callable[[Sequence], Vertex] = min_vertex_anchor,
) -> tuple[TriangularSkeleton, frozenset]:
    """Fan-triangulate every face from an anchor vertex.

    Returns the triangulated skeleton (same vertex set) and the set of
    diagonals, i.e. the added edges absent from ``H``.
    """
    report = validate_skeleton(H)
    if not report.ok:
        raise SkeletonError("invalid skeleton: " + "; ".join(i.message for i in report.issues))
    triangles = []
    for f in H.faces:
        if len(f) == 3:
            triangles.append(tuple(f))
            continue
        a = anchor_rule(f)
        i = f.index(a)
        rot = f[i:] + f[:i]
        for j in range(1, len(rot) - 1):
            triangles.append((rot[0], rot[j], rot[j + 1]))
    T = TriangularSkeleton(H.vertices, tuple(triangles))
    diagonals = frozenset(T.edges - H.edges)
    check = validate_skeleton(T)
    if not check.ok:
        raise SkeletonError(
            "fan triangulation is not a valid skeleton (a chord coincides with an existing edge); "
            "choose another anchor rule: " + check.issues[0].message
        )
    return T, diagonals
