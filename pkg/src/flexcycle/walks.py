"""Vertex coloring from a point configuration on M, red/blue walks, red-achievability."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import projective as pm
from .errors import AcyclicWalkError, ColoringError, FlipError
from .flips import flip
from .skeleton import TriangularSkeleton, edge, sorted_edges, sorted_vertices

RED, BLUE, GOLD = "red", "blue", "gold"
DEFAULT_STATE_CAP = 100_000


@dataclass(frozen=True)
class DistinguishedEdge:
    """Edge ``{w1, w2}`` with the opposite vertices ``s`` (south) and ``n`` (north)."""

    edge: tuple
    south: object
    north: object

    @classmethod
    def of(cls, T: TriangularSkeleton, w1, w2, south=None) -> "DistinguishedEdge":
        opp = T.opposite_vertices((w1, w2))
        if len(opp) != 2 or opp[0] == opp[1]:
            raise ColoringError(f"edge {(w1, w2)} does not have two distinct opposite vertices")
        if south is None:
            south = opp[0]
        if south not in opp:
            raise ColoringError(f"{south} is not opposite to {(w1, w2)}")
        north = opp[1] if south == opp[0] else opp[0]
        return cls((w1, w2), south, north)


@dataclass(frozen=True)
class VertexColoring:
    colors: dict
    s: object = None
    distinguished: DistinguishedEdge | None = None

    def __getitem__(self, v):
        return self.colors[v]

    def of(self, color) -> frozenset:
        return frozenset(v for v, c in self.colors.items() if c == color)


def _same_direction(a, b, tol) -> bool:
    """Projective equality of two 3-vectors via all 2x2 minors."""
    a = a / np.abs(a).max()
    b = b / np.abs(b).max()
    for i in range(3):
        for j in range(i + 1, 3):
            if abs(a[i] * b[j] - a[j] * b[i]) > tol:
                return False
    return True


def color_vertices(rho_inf: dict, s, tol: float = pm.DEFAULT_TOL) -> VertexColoring:
    """Red for finite points of M, blue for infinite points aligned with ``rho_inf[s]``, else gold."""
    ps = rho_inf[s]
    if pm.classify_point(ps, tol) != pm.ON_M_INFINITY:
        raise ColoringError(f"rho_infinity({s}) is not a point of M at infinity")
    s_dir = ps.scaled()[:3]
    if np.abs(s_dir).max() <= tol:
        raise ColoringError(f"rho_infinity({s}) is the exceptional point")
    colors = {}
    for v in sorted_vertices(rho_inf):
        kind = pm.classify_point(rho_inf[v], tol)
        if kind == pm.OFF_M:
            raise ColoringError(f"rho_infinity({v}) is not on M")
        if kind == pm.ON_M_FINITE:
            colors[v] = RED
        else:
            d = rho_inf[v].scaled()[:3]
            colors[v] = BLUE if np.abs(d).max() > tol and _same_direction(d, s_dir, tol) else GOLD
    return VertexColoring(colors, s)


@dataclass(frozen=True)
class Walk:
    vertices: frozenset
    edges: frozenset


@dataclass(frozen=True)
class WalkPair:
    red_walk: Walk
    blue_walk: Walk
    edge_class: frozenset


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, a):
        self.parent.setdefault(a, a)
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb, key=repr)] = min(ra, rb, key=repr)


def red_blue_walks(T: TriangularSkeleton, coloring: VertexColoring, seed, face_order=None) -> WalkPair:
    """Red and blue walk of the class of ``seed`` under the same-triangle relation.

    Red-blue edges in a common triangle are related; the class of ``seed``
    is the reflexive-transitive closure.  The red walk consists of the red
    endpoints of the class together with the red-red edge of each class
    triangle with two red vertices; the blue walk symmetrically.
    """
    seed = edge(*seed)
    colors = coloring.colors

    def is_rb(e):
        return {colors[e[0]], colors[e[1]]} == {RED, BLUE}

    if seed not in T.edges:
        raise ColoringError(f"seed {seed} is not an edge")
    if not is_rb(seed):
        raise ColoringError(f"seed {seed} is not a red-blue edge")
    faces = T.faces if face_order is None else [T.faces[i] for i in face_order]
    uf = _UnionFind()
    rb_faces = []
    for f in faces:
        rb = [e for e in (edge(f[0], f[1]), edge(f[1], f[2]), edge(f[0], f[2])) if is_rb(e)]
        for e in rb:
            uf.find(e)
        if len(rb) == 2:
            uf.union(rb[0], rb[1])
            rb_faces.append((f, rb))
    root = uf.find(seed)
    cls = frozenset(e for e in uf.parent if uf.find(e) == root)
    red_v = {v for e in cls for v in e if colors[v] == RED}
    blue_v = {v for e in cls for v in e if colors[v] == BLUE}
    red_e, blue_e = set(), set()
    for f, rb in rb_faces:
        if rb[0] in cls:
            reds = [v for v in f if colors[v] == RED]
            blues = [v for v in f if colors[v] == BLUE]
            if len(reds) == 2:
                red_e.add(edge(*reds))
            else:
                blue_e.add(edge(*blues))
    return WalkPair(Walk(frozenset(red_v), frozenset(red_e)), Walk(frozenset(blue_v), frozenset(blue_e)), cls)


def cycle_in_red_walk(walk: WalkPair, e) -> tuple:
    """Shortest simple cycle through ``e`` inside the red walk (ties lexicographic)."""
    from .cycles import Graph, enumerate_cycles

    e = edge(*e)
    red = walk.red_walk
    if e not in red.edges:
        raise ColoringError(f"{e} is not an edge of the red walk")
    G = Graph(red.vertices, red.edges)
    for cyc in enumerate_cycles(G, e):
        return cyc
    raise AcyclicWalkError(f"red walk is acyclic through {e}")


@dataclass
class RedAchievability:
    vertices: frozenset
    witnesses: dict
    exhaustive: bool
    states: int
    seedless_states: int = 0


def red_achievable(
    T: TriangularSkeleton,
    coloring: VertexColoring,
    seed,
    e_const,
    state_cap: int = DEFAULT_STATE_CAP,
) -> RedAchievability:
    """Vertices in the red walk of some flip of ``T`` on ``e_const`` edges.

    Breadth-first over flip states; each vertex gets a shortest witnessing
    flip sequence.  ``exhaustive`` is False when ``state_cap`` cut the search.
    Flip states in which the seed is no longer an edge contribute nothing.
    """
    e_const = sorted_edges({edge(*x) for x in e_const})
    seed = edge(*seed)
    start_key = T.canonical()
    seen = {start_key}
    queue = deque([(T, ())])
    witnesses: dict = {}
    seedless = 0
    exhaustive = True
    explored = 0
    while queue:
        S, seq = queue.popleft()
        explored += 1
        if seed in S.edges:
            walk = red_blue_walks(S, coloring, seed)
            for v in sorted_vertices(walk.red_walk.vertices):
                witnesses.setdefault(v, seq)
        else:
            seedless += 1
        for e in e_const:
            if e not in S.edges:
                continue
            try:
                S2 = flip(S, e)
            except FlipError:
                continue
            key = S2.canonical()
            if key in seen:
                continue
            if len(seen) >= state_cap:
                exhaustive = False
                continue
            seen.add(key)
            queue.append((S2, seq + (e,)))
    return RedAchievability(frozenset(witnesses), witnesses, exhaustive, explored, seedless)


@dataclass
class RedConstReport:
    edge: tuple
    passed: bool
    vacuous: bool
    offending: list = field(default_factory=list)


def check_red_const_edge(T: TriangularSkeleton, e, achievable) -> RedConstReport:
    """If both endpoints of ``e`` are achievable, neither opposite vertex may be."""
    e = edge(*e)
    achievable = set(achievable)
    if not (e[0] in achievable and e[1] in achievable):
        return RedConstReport(e, True, True)
    bad = [(e[0], e[1], u) for u in T.opposite_vertices(e) if u in achievable]
    return RedConstReport(e, not bad, False, bad)


def coloring_from_colors(colors: dict, s=None) -> VertexColoring:
    for v, c in colors.items():
        if c not in (RED, BLUE, GOLD):
            raise ColoringError(f"unknown color {c!r} for vertex {v}")
    if s is None:
        blues = sorted_vertices(v for v, c in colors.items() if c == BLUE)
        s = blues[0] if blues else None
    return VertexColoring(dict(colors), s)


