"""Zero-sum cycles: cycle enumeration through an edge and the +-1 sign solver."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

import numpy as np

from .skeleton import edge, sorted_edges, sorted_vertices, vertex_key

DEFAULT_REL_TOL = 1e-8
EXHAUSTIVE_MAX_K = 24


class Graph:
    """Simple undirected graph with deterministic (sorted) adjacency."""

    def __init__(self, vertices, edges):
        self.edges = frozenset(edge(*e) for e in edges)
        self.vertices = tuple(sorted_vertices(set(vertices) | {v for e in self.edges for v in e}))
        adj = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        self.adj = {v: sorted_vertices(ns) for v, ns in adj.items()}

    @classmethod
    def of(cls, G) -> "Graph":
        if isinstance(G, Graph):
            return G
        return cls(G.vertices, G.edges)

    def has_edge(self, u, v) -> bool:
        return edge(u, v) in self.edges


def _distances_to(G: Graph, target, usable) -> dict:
    dist = {target: 0}
    queue = deque([target])
    while queue:
        a = queue.popleft()
        for b in G.adj[a]:
            if b not in dist and usable(a, b):
                dist[b] = dist[a] + 1
                queue.append(b)
    return dist


def enumerate_cycles(
    G,
    through,
    allowed: Callable[[tuple], bool] | None = None,
    max_len: int | None = None,
    avoid_vertices=(),
) -> Iterator[tuple]:
    """Simple cycles containing edge ``through``, shortest first.

    A cycle is yielded once as the vertex tuple ``(w1, w2, ..., v_k)`` with
    ``(w1, w2) = through`` in canonical order; the closing edge ``v_k w1`` is
    implicit.  Within one length, tuples come in lexicographic order.  Only
    edges accepted by ``allowed`` are used.
    """
    G = Graph.of(G)
    w1, w2 = edge(*through)
    if max_len is None:
        max_len = len(G.vertices)
    allowed = allowed or (lambda e: True)
    avoid = set(avoid_vertices)
    if (w1, w2) not in G.edges or not allowed((w1, w2)) or w1 in avoid or w2 in avoid:
        return

    def usable(a, b):
        e = edge(a, b)
        return e != (w1, w2) and allowed(e) and a not in avoid and b not in avoid

    dist = _distances_to(G, w1, usable)
    if w2 not in dist:
        return
    for L in range(max(3, dist[w2] + 1), max_len + 1):
        path = [w1, w2]
        on_path = {w1, w2}

        def extend(v):
            # path holds len(path) vertices; the cycle closes back to w1 from the last one
            remaining = L - len(path)
            if remaining == 0:
                if v != w2 and usable(v, w1):
                    yield tuple(path)
                return
            for nb in G.adj[v]:
                if nb in on_path or not usable(v, nb):
                    continue
                d = dist.get(nb)
                if d is None or d > remaining:
                    continue
                path.append(nb)
                on_path.add(nb)
                yield from extend(nb)
                path.pop()
                on_path.discard(nb)

        yield from extend(w2)


def _check_lengths(lengths):
    if len(lengths) < 2:
        raise ValueError("sign assignment needs at least two lengths")
    for x in lengths:
        if not x > 0:
            raise ValueError(f"nonpositive length {x}")


def _signed_sums(values, first_fixed: bool):
    """All signed sums in lexicographic sign order (+ before -)."""
    values = np.asarray(values, dtype=float)
    if first_fixed:
        sums, rest = np.array([values[0]]), values[1:]
    else:
        sums, rest = np.array([0.0]), values
    for v in rest:
        sums = np.stack([sums + v, sums - v], axis=1).ravel()
    return sums


def _decode(index: int, width: int) -> list:
    return [-1 if (index >> (width - 1 - j)) & 1 else 1 for j in range(width)]


def exhaustive_sign_assignment(lengths, tol: float | None = None):
    """Lexicographically smallest ``eta`` with ``eta[0] = +1`` and ``|sum| <= tol``, by full enumeration."""
    _check_lengths(lengths)
    if tol is None:
        tol = DEFAULT_REL_TOL * max(lengths)
    sums = _signed_sums(lengths, first_fixed=True)
    hits = np.flatnonzero(np.abs(sums) <= tol)
    if hits.size == 0:
        return None
    return tuple([1] + _decode(int(hits[0]), len(lengths) - 1))


def mitm_sign_assignment(lengths, tol: float | None = None):
    """Same contract as :func:`exhaustive_sign_assignment`, by meet in the middle."""
    _check_lengths(lengths)
    if tol is None:
        tol = DEFAULT_REL_TOL * max(lengths)
    k = len(lengths)
    m = (k + 1) // 2
    left = _signed_sums(lengths[:m], first_fixed=True)
    right = _signed_sums(lengths[m:], first_fixed=False)
    order = np.argsort(right, kind="stable")
    rs = right[order]
    lo = np.searchsorted(rs, -left - tol, side="left")
    hi = np.searchsorted(rs, -left + tol, side="right")
    hit = np.flatnonzero(hi > lo)
    if hit.size == 0:
        return None
    i = int(hit[0])
    j = int(order[lo[i]:hi[i]].min())
    return tuple([1] + _decode(i, m - 1) + _decode(j, k - m))


def _as_integers(lengths) -> list:
    fr = [Fraction(x) for x in lengths]
    den = 1
    for f in fr:
        den = den * f.denominator // math.gcd(den, f.denominator)
    return [int(f * den) for f in fr]


def exact_sign_assignment(lengths):
    """Exact zero-sum signs for rational lengths (meet in the middle over integers)."""
    _check_lengths(lengths)
    ints = _as_integers(lengths)
    k = len(ints)
    m = (k + 1) // 2

    def sums(vals, first_fixed):
        out = [vals[0]] if first_fixed else [0]
        for v in vals[1 if first_fixed else 0:]:
            out = [s + d for s in out for d in (v, -v)]
        return out

    right_first = {}
    for j, s in enumerate(sums(ints[m:], False)):
        right_first.setdefault(s, j)
    for i, s in enumerate(sums(ints[:m], True)):
        j = right_first.get(-s)
        if j is not None:
            return tuple([1] + _decode(i, m - 1) + _decode(j, k - m))
    return None


def sign_assignment(lengths, tol: float | None = None, exact: bool = False):
    """Signs ``eta`` in {-1, +1}^k with ``|sum eta_j lambda_j| <= tol``, or None.

    Deterministic: the lexicographically smallest solution (``+`` before
    ``-``) with ``eta[0] = +1``.  Full enumeration up to 24 lengths, meet in
    the middle beyond.  ``exact=True`` treats the lengths as rationals and
    requires an exact zero.
    """
    if exact:
        return exact_sign_assignment(lengths)
    if len(lengths) <= EXHAUSTIVE_MAX_K:
        return exhaustive_sign_assignment(lengths, tol)
    return mitm_sign_assignment(lengths, tol)


@dataclass(frozen=True)
class CycleCertificate:
    """A cycle ``v_1 ... v_k`` (closing edge implicit), signs and the residual."""

    cycle: tuple
    signs: tuple
    residual: float
    avoided: frozenset = field(default_factory=frozenset)

    @property
    def edges(self) -> list:
        k = len(self.cycle)
        return [edge(self.cycle[j], self.cycle[(j + 1) % k]) for j in range(k)]

    def to_dict(self) -> dict:
        return {
            "cycle": list(self.cycle),
            "signs": list(self.signs),
            "residual": float(self.residual),
            "avoided": [list(e) for e in sorted_edges(self.avoided)],
        }

    @classmethod
    def from_dict(cls, d) -> "CycleCertificate":
        return cls(
            tuple(d["cycle"]),
            tuple(int(s) for s in d["signs"]),
            float(d["residual"]),
            frozenset(edge(*e) for e in d.get("avoided", [])),
        )


def _is_induced(G: Graph, cycle) -> bool:
    k = len(cycle)
    on = set(cycle)
    cyc_edges = {edge(cycle[j], cycle[(j + 1) % k]) for j in range(k)}
    return all(not (e[0] in on and e[1] in on) or e in cyc_edges for e in G.edges)


def find_zero_sum_cycle(
    G,
    lengths,
    e,
    forbidden=(),
    max_len: int | None = None,
    tol: float | None = None,
    mode: str = "general",
    exact: bool = False,
    avoid_vertices=(),
    rel_tol: float = DEFAULT_REL_TOL,
):
    """First (shortest, then lexicographic) cycle through ``e`` admitting zero-sum signs.

    Parameters
    ----------
    G : graph-like
        Anything with ``vertices`` and ``edges``.
    lengths : mapping
        Edge -> length (float, or rational when ``exact``).
    forbidden : iterable of edges
        Edges the cycle must avoid.
    tol : float, optional
        Absolute tolerance; default ``rel_tol * max length on the cycle``.
    mode : {"general", "induced"}
        ``"induced"`` also requires an induced cycle avoiding ``avoid_vertices``
        (typically the two opposite vertices ``s`` and ``n`` of ``e``).

    Returns
    -------
    CycleCertificate or None
    """
    if mode not in ("general", "induced"):
        raise ValueError(f"unknown mode {mode!r}")
    G = Graph.of(G)
    forbidden = frozenset(edge(*f) for f in forbidden)
    e = edge(*e)
    if e in forbidden:
        raise ValueError(f"{e} is forbidden")
    avoid = avoid_vertices if mode == "induced" else ()
    for cyc in enumerate_cycles(G, e, lambda x: x not in forbidden, max_len, avoid):
        if mode == "induced" and not _is_induced(G, cyc):
            continue
        k = len(cyc)
        lam = [lengths[edge(cyc[j], cyc[(j + 1) % k])] for j in range(k)]
        if exact:
            eta = exact_sign_assignment(lam)
            if eta is None:
                continue
            return CycleCertificate(cyc, eta, 0.0, forbidden)
        cyc_tol = tol if tol is not None else rel_tol * max(lam)
        eta = sign_assignment(lam, cyc_tol)
        if eta is not None:
            residual = abs(math.fsum(s * float(x) for s, x in zip(eta, lam)))
            return CycleCertificate(cyc, eta, residual, forbidden)
    return None


def verify_certificate(cert: CycleCertificate, lengths, forbidden=(), tol: float | None = None,
                       rel_tol: float = DEFAULT_REL_TOL) -> bool:
    """Independent re-check of a certificate against the edge lengths.

    ``lengths`` also defines the edge set.  With rational lengths the sum must
    vanish exactly.
    """
    cyc = list(cert.cycle)
    k = len(cyc)
    if k < 3 or len(set(cyc)) != k or len(cert.signs) != k:
        return False
    if any(s not in (1, -1) for s in cert.signs):
        return False
    forb = {frozenset(f) for f in forbidden}
    known = {frozenset(x): val for x, val in lengths.items()}
    vals = []
    for j in range(k):
        pair = frozenset((cyc[j], cyc[(j + 1) % k]))
        if pair not in known or pair in forb:
            return False
        vals.append(known[pair])
    if all(isinstance(v, (int, Fraction)) for v in vals):
        return sum(Fraction(s) * Fraction(v) for s, v in zip(cert.signs, vals)) == 0
    if tol is None:
        tol = rel_tol * max(float(v) for v in vals)
    return abs(math.fsum(s * float(v) for s, v in zip(cert.signs, vals))) <= tol


def cycle_sort_key(cycle) -> tuple:
    return (len(cycle), tuple(vertex_key(v) for v in cycle))
