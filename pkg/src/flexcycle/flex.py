"""Rigidity systems, infinitesimal flex dimension and numerical flex tracing.

The constraint map of a framework with a pinned triangle ``(w1, w2, n)`` is

    F(x) = ( |x_u - x_v|^2 - lambda_uv^2  for each constrained pair {u, v},
             x_w - anchor_w               for w in (w1, w2, n) )

and its Jacobian is the rigidity matrix augmented with the 9 pinning rows.
For triangular skeletons the constrained pairs are the edges.  For general
2-skeletons every pair of vertices sharing a face is constrained, which is
exactly "each face moves as a rigid body".  Distances alone leave a planar
face with spurious first-order out-of-plane motions, so each face with
``k > 3`` vertices also keeps ``k - 3`` signed volumes
``det(x_b - x_a, x_c - x_a, x_d - x_a)`` against a reference triangle
``(a, b, c)``; proper rigid motions preserve them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BranchPointError,
    CorrectorDivergenceError,
    DegenerateError,
    HigherDimensionalFlexError,
    InsufficientSamplesError,
    RigidError,
)
from .geometry import Realization, canonical_pairs, dihedral_angle, face_pair_profile, triangle_area
from .skeleton import edge, sorted_edges, sorted_vertices, vertex_key

logger = logging.getLogger(__name__)

DEFAULT_RANK_TOL = 1e-8
DEFAULT_CONSTANCY_TOL = 1e-7
DEFAULT_CORRECTOR_TOL = 1e-10
PROGRESS_THRESHOLD = 1e-10
MIN_STEP = 1e-8


def face_volume_quads(G, rho: Realization) -> list:
    """``(a, b, c, d)`` quadruples of the signed-volume constraints of ``G``."""
    quads = []
    for f in getattr(G, "faces", ()):
        if len(f) <= 3:
            continue
        a, b = f[0], f[1]
        c = max(f[2:], key=lambda w: triangle_area(rho, (a, b, w))[0])
        quads.extend((a, b, c, d) for d in f[2:] if d != c)
    return quads


def _volume(P, quad_idx):
    a, b, c, d = (P[quad_idx[:, k]] for k in range(4))
    return np.einsum("ij,ij->i", b - a, np.cross(c - a, d - a))


def constraint_pairs(G) -> list:
    """Edges of ``G`` plus, for non-triangular faces, every intra-face pair."""
    pairs = set(G.edges)
    for f in getattr(G, "faces", ()):
        if len(f) > 3:
            pairs.update(edge(u, v) for i, u in enumerate(f) for v in f[i + 1:] if u != v)
    return sorted_edges(pairs)


@dataclass(frozen=True)
class PinnedFrame:
    """Triangle ``(w1, w2, n)`` fixed to anchor coordinates."""

    triangle: tuple
    anchors: tuple

    def __post_init__(self):
        if len(self.triangle) != 3 or len(set(self.triangle)) != 3:
            raise DegenerateError(f"pin needs three distinct vertices, got {self.triangle}")
        anchors = tuple(np.array(a, dtype=float).reshape(3) for a in self.anchors)
        object.__setattr__(self, "triangle", tuple(self.triangle))
        object.__setattr__(self, "anchors", anchors)
        a, b, c = anchors
        area = 0.5 * np.linalg.norm(np.cross(b - a, c - a))
        longest = max(np.linalg.norm(b - a), np.linalg.norm(c - b), np.linalg.norm(a - c))
        if longest == 0.0 or area <= 1e-9 * longest**2:
            raise DegenerateError(f"degenerate pin triangle {self.triangle}")

    @classmethod
    def from_realization(cls, triangle, rho: Realization) -> "PinnedFrame":
        return cls(tuple(triangle), tuple(rho[v] for v in triangle))

    def transformed(self, R, t=(0.0, 0.0, 0.0)) -> "PinnedFrame":
        R = np.asarray(R, dtype=float)
        return PinnedFrame(self.triangle, tuple(R @ a + np.asarray(t, dtype=float) for a in self.anchors))


def default_pin(T, rho: Realization) -> PinnedFrame:
    """Lexicographically first non-degenerate triangular face."""
    tris = sorted(
        (tuple(sorted_vertices(f)) for f in T.faces if len(f) == 3),
        key=lambda f: tuple(vertex_key(v) for v in f),
    )
    for f in tris:
        area, longest = triangle_area(rho, f)
        if longest > 0 and area > 1e-9 * longest**2:
            return PinnedFrame.from_realization(f, rho)
    raise DegenerateError("no non-degenerate triangle available for pinning")


class ConstraintSystem:
    """Squared-length and pinning equations over the flattened coordinates."""

    def __init__(self, order, pairs, targets, pin: PinnedFrame | None, volumes=(), volume_targets=()):
        self.order = tuple(order)
        self.index = {v: i for i, v in enumerate(self.order)}
        self.pairs = list(pairs)
        self.targets = np.asarray(targets, dtype=float)
        self.pin = pin
        self._I = np.array([self.index[u] for u, _ in self.pairs], dtype=int)
        self._J = np.array([self.index[v] for _, v in self.pairs], dtype=int)
        self.volumes = [tuple(q) for q in volumes]
        self.volume_targets = np.asarray(volume_targets, dtype=float).reshape(len(self.volumes))
        self._Q = np.array([[self.index[v] for v in q] for q in self.volumes], dtype=int).reshape(-1, 4)

    @classmethod
    def for_skeleton(cls, G, rho: Realization, pin: PinnedFrame | None) -> "ConstraintSystem":
        order = sorted_vertices(G.vertices)
        pairs = constraint_pairs(G)
        targets = [rho.distance(u, v) for u, v in pairs]
        quads = face_volume_quads(G, rho)
        self = cls(order, pairs, targets, pin, quads, np.zeros(len(quads)))
        if quads:
            self.volume_targets = _volume(rho.array(order), self._Q)
        return self

    @property
    def n_vars(self) -> int:
        return 3 * len(self.order)

    def _points(self, x):
        return np.asarray(x, dtype=float).reshape(len(self.order), 3)

    def residuals(self, x) -> np.ndarray:
        P = self._points(x)
        d = P[self._I] - P[self._J]
        out = [(d**2).sum(axis=1) - self.targets**2]
        if self.volumes:
            out.append(_volume(P, self._Q) - self.volume_targets)
        if self.pin is not None:
            for v, a in zip(self.pin.triangle, self.pin.anchors):
                out.append(P[self.index[v]] - a)
        return np.concatenate(out)

    def jacobian(self, x) -> np.ndarray:
        P = self._points(x)
        nq = len(self.volumes)
        m = len(self.pairs) + nq + (9 if self.pin is not None else 0)
        Jm = np.zeros((m, self.n_vars))
        d = P[self._I] - P[self._J]
        rows = np.arange(len(self.pairs))
        for k in range(3):
            Jm[rows, 3 * self._I + k] = 2.0 * d[:, k]
            Jm[rows, 3 * self._J + k] = -2.0 * d[:, k]
        for r, (ia, ib, ic, id_) in enumerate(self._Q, start=len(self.pairs)):
            a, b, c, w = P[ia], P[ib], P[ic], P[id_]
            gb = np.cross(c - a, w - a)
            gc = np.cross(w - a, b - a)
            gd = np.cross(b - a, c - a)
            for i, g in ((ib, gb), (ic, gc), (id_, gd), (ia, -(gb + gc + gd))):
                Jm[r, 3 * i:3 * i + 3] += g
        if self.pin is not None:
            r = len(self.pairs) + nq
            for v in self.pin.triangle:
                i = self.index[v]
                for k in range(3):
                    Jm[r, 3 * i + k] = 1.0
                    r += 1
        return Jm

    def length_residuals(self, x) -> np.ndarray:
        P = self._points(x)
        lengths = np.linalg.norm(P[self._I] - P[self._J], axis=1)
        return np.abs(lengths - self.targets)

    def volume_residual(self, x) -> float:
        """Largest signed-volume deviation, divided by the squared length scale."""
        if not self.volumes:
            return 0.0
        scale = max(1.0, float(self.targets.max(initial=0.0)))
        dev = np.abs(_volume(self._points(x), self._Q) - self.volume_targets)
        return float(dev.max()) / scale**2

    def pin_residual(self, x) -> float:
        if self.pin is None:
            return 0.0
        P = self._points(x)
        return max(float(np.abs(P[self.index[v]] - a).max()) for v, a in zip(self.pin.triangle, self.pin.anchors))


def kernel_basis(Jm: np.ndarray, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the numerical kernel of ``Jm``."""
    n = Jm.shape[1]
    _, s, Vt = np.linalg.svd(Jm, full_matrices=True)
    if s.size == 0 or s[0] == 0.0:
        return np.eye(n)
    rank = int((s >= rank_tol * s[0]).sum())
    return Vt[rank:].T


def _check_satisfied(system: ConstraintSystem, x, tol=1e-8):
    scale = max(1.0, float(system.targets.max(initial=0.0)))
    if (
        system.length_residuals(x).max(initial=0.0) > tol * scale
        or system.pin_residual(x) > tol * scale
        or system.volume_residual(x) > tol * scale
    ):
        raise ValueError("realization does not satisfy the pinned constraint system")


def flex_dimension(G, rho: Realization, pin: PinnedFrame, rank_tol: float = DEFAULT_RANK_TOL) -> int:
    """Dimension of the kernel of the pinned rigidity Jacobian at ``rho``."""
    system = ConstraintSystem.for_skeleton(G, rho, pin)
    x = rho.array(system.order).ravel()
    _check_satisfied(system, x)
    return kernel_basis(system.jacobian(x), rank_tol).shape[1]


@dataclass(frozen=True)
class SampledFlex:
    """Ordered samples ``f(t_0) = rho_0, f(t_1), ...`` with ``0 = t_0 < t_1 < ... < 1``."""

    parameters: tuple
    samples: tuple
    termination: str = "supplied"

    def __post_init__(self):
        object.__setattr__(self, "parameters", tuple(float(t) for t in self.parameters))
        object.__setattr__(self, "samples", tuple(self.samples))
        if len(self.parameters) != len(self.samples):
            raise ValueError("parameters and samples differ in length")

    def __len__(self):
        return len(self.samples)

    def stack(self, order=None) -> np.ndarray:
        """Array of shape ``(n_samples, n_vertices, 3)``."""
        order = self.samples[0].order if order is None else order
        return np.array([s.array(order) for s in self.samples])


def _orient_initial(system: ConstraintSystem, x, tangent, constrained: set) -> np.ndarray:
    """Fix the sign of the first tangent by an isometry-invariant rule.

    The first vertex pair (unconstrained pairs before constrained ones, each
    in canonical order) whose squared distance changes noticeably must grow.
    """
    P = system._points(x)
    T = system._points(tangent)
    pairs = canonical_pairs(system.order)
    pairs.sort(key=lambda p: p in constrained)
    idx = system.index
    rates = np.array([2.0 * (P[idx[u]] - P[idx[v]]) @ (T[idx[u]] - T[idx[v]]) for u, v in pairs])
    big = np.abs(rates).max(initial=0.0)
    for r in rates:
        if abs(r) > 1e-6 * big:
            return tangent if r > 0 else -tangent
    return tangent


def _converged(system: ConstraintSystem, x, tol, scale) -> bool:
    return bool(
        system.length_residuals(x).max(initial=0.0) < tol
        and system.pin_residual(x) < tol * scale
        and system.volume_residual(x) < tol * scale
    )


def _correct(system: ConstraintSystem, x_pred, tangent, tol, max_iter=30):
    x = x_pred.copy()
    scale = max(1.0, float(system.targets.max(initial=0.0)))
    for _ in range(max_iter):
        F = np.concatenate([system.residuals(x), [tangent @ (x - x_pred)]])
        Ja = np.vstack([system.jacobian(x), tangent[None, :]])
        dx = np.linalg.lstsq(Ja, -F, rcond=None)[0]
        x = x + dx
        if not np.all(np.isfinite(x)):
            return x, False
        if (
            np.linalg.norm(dx) < 1e-3 * tol
            or _converged(system, x, tol, scale)
        ):
            # one extra Newton step polishes the last digits cheaply
            F = np.concatenate([system.residuals(x), [tangent @ (x - x_pred)]])
            Ja = np.vstack([system.jacobian(x), tangent[None, :]])
            x = x + np.linalg.lstsq(Ja, -F, rcond=None)[0]
            return x, _converged(system, x, tol, scale)
    return x, False


def trace_flex(
    G,
    rho0: Realization,
    pin: PinnedFrame | None = None,
    step: float = 1e-2,
    max_samples: int = 100,
    corrector_tol: float = DEFAULT_CORRECTOR_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
    direction: int = 1,
    min_step: float = MIN_STEP,
) -> SampledFlex:
    """Trace the one-parameter flex of ``(G, rho0)`` by predictor-corrector continuation.

    The predictor is the unit kernel vector of the pinned Jacobian, the
    corrector a Gauss-Newton iteration on the constraints plus the
    hyperplane orthogonal to the predictor.  Failed corrections halve the
    step; tracing stops at ``max_samples`` samples or when the step falls
    below ``min_step``.  The parameter stored is ``s / (1 + s)`` for the
    accumulated chord length ``s``, so it stays in ``[0, 1)``.

    Raises
    ------
    RigidError
        The kernel is trivial at ``rho0``.
    HigherDimensionalFlexError
        The kernel has dimension > 1 at ``rho0``.
    BranchPointError
        The kernel dimension changes at an accepted sample.
    CorrectorDivergenceError
        Not even one step could be taken.
    """
    if pin is None:
        pin = default_pin(G, rho0)
    system = ConstraintSystem.for_skeleton(G, rho0, pin)
    x = rho0.array(system.order).ravel()
    _check_satisfied(system, x)
    K = kernel_basis(system.jacobian(x), rank_tol)
    if K.shape[1] == 0:
        raise RigidError("rigid: the pinned framework has no infinitesimal flex")
    if K.shape[1] > 1:
        raise HigherDimensionalFlexError(f"tangent space has dimension {K.shape[1]}; branch selection unsupported")
    tangent = _orient_initial(system, x, K[:, 0], set(system.pairs))
    if direction < 0:
        tangent = -tangent

    order = system.order
    xs = [x]
    params = [0.0]
    arc = 0.0
    h = step
    termination = "max_samples"
    D_prev = Realization.from_array(order, x).distance_matrix()
    while len(xs) < max_samples:
        accepted = None
        while h >= min_step:
            xc, ok = _correct(system, xs[-1] + h * tangent, tangent, corrector_tol)
            if ok and np.linalg.norm(xc - xs[-1] - h * tangent) <= h:
                Kc = kernel_basis(system.jacobian(xc), rank_tol)
                if Kc.shape[1] != 1:
                    partial = SampledFlex(params, [Realization.from_array(order, y) for y in xs], "branch_point")
                    raise BranchPointError(
                        f"branch point: kernel dimension {Kc.shape[1]} near parameter {params[-1]:.6g}", partial
                    )
                t_new = Kc[:, 0]
                if t_new @ tangent < 0:
                    t_new = -t_new
                D = Realization.from_array(order, xc).distance_matrix()
                if t_new @ tangent > 0.5 and np.abs(D - D_prev).max() > PROGRESS_THRESHOLD:
                    accepted = (xc, t_new, D)
                    break
            h /= 2.0
        if accepted is None:
            if len(xs) == 1:
                raise CorrectorDivergenceError(
                    f"corrector divergence at parameter {params[-1]:.6g}", parameter=params[-1]
                )
            termination = "step_underflow"
            logger.info("step underflow after %d samples", len(xs))
            break
        xc, tangent, D_prev = accepted
        arc += float(np.linalg.norm(xc - xs[-1]))
        xs.append(xc)
        params.append(arc / (1.0 + arc))
        h = min(step, 2.0 * h)
    return SampledFlex(params, [Realization.from_array(order, y) for y in xs], termination)


def validate_flex(G, flex: SampledFlex, rho0: Realization | None = None, tol: float = 1e-9) -> list:
    """Problems with ``flex`` as a flex of ``G``; empty when every invariant holds.

    Edge (and face-internal) lengths are compared to the first sample with
    absolute tolerance ``tol * max length``.
    """
    problems = []
    if len(flex) == 0:
        return ["flex has no samples"]
    t = flex.parameters
    if t[0] != 0.0:
        problems.append(f"first parameter is {t[0]}, expected 0")
    if any(b <= a for a, b in zip(t, t[1:])):
        problems.append("parameters are not strictly increasing")
    if t[-1] >= 1.0:
        problems.append("parameters must stay below 1")
    first = flex.samples[0]
    missing = set(G.vertices) - set(first)
    if missing:
        return problems + [f"samples lack vertices {sorted_vertices(missing)}"]
    if rho0 is not None:
        if any(not np.array_equal(first[v], rho0[v]) for v in G.vertices):
            problems.append("first sample differs from the initial realization")
    pairs = constraint_pairs(G)
    ref = np.array([first.distance(u, v) for u, v in pairs])
    scale = float(ref.max(initial=1.0))
    order = sorted_vertices(G.vertices)
    D_prev = first.distance_matrix(order)
    for k, s in enumerate(flex.samples[1:], start=1):
        cur = np.array([s.distance(u, v) for u, v in pairs])
        worst = np.abs(cur - ref).max(initial=0.0)
        if worst > tol * scale:
            i = int(np.abs(cur - ref).argmax())
            problems.append(f"sample {k}: length of {pairs[i]} deviates by {worst:.3e}")
        D = s.distance_matrix(order)
        if np.abs(D - D_prev).max() <= PROGRESS_THRESHOLD:
            problems.append(f"sample {k} is congruent to sample {k - 1}")
        D_prev = D
    return problems


def relative_variation(values) -> float:
    """``(max - min) / max`` of a sequence of non-negative values."""
    values = np.asarray(values, dtype=float)
    top = float(values.max())
    if top == 0.0:
        return 0.0
    return float((top - values.min()) / top)


def _need_two(flex: SampledFlex):
    if len(flex) < 2:
        raise InsufficientSamplesError("constancy tests need at least 2 samples")


def constant_distance_pairs(V, flex: SampledFlex, tol: float = DEFAULT_CONSTANCY_TOL) -> frozenset:
    """Unordered vertex pairs whose distance varies by less than ``tol`` (relative)."""
    _need_two(flex)
    order = sorted_vertices(V)
    D = np.array([s.distance_matrix(order) for s in flex.samples])
    top = D.max(axis=0)
    spread = D.max(axis=0) - D.min(axis=0)
    out = set()
    for i in range(len(order)):
        for j in range(i + 1, len(order)):
            if top[i, j] == 0.0 or spread[i, j] < tol * top[i, j]:
                out.add((order[i], order[j]))
    return frozenset(out)


@dataclass
class EdgeClassification:
    e_const: frozenset
    e_moving: frozenset
    variation: dict = field(default_factory=dict)
    angle_variation: dict = field(default_factory=dict)
    boundary: frozenset = frozenset()
    criterion: str = "opposite-distance"


def classify_edges(T, flex: SampledFlex, tol: float = DEFAULT_CONSTANCY_TOL) -> EdgeClassification:
    """Split the edges of ``T`` into constant and moving ones along ``flex``.

    Triangular skeletons use the distance between the two opposite vertices
    of each edge.  General 2-skeletons use the cross-distance profile of the
    two faces at each edge.  Edges lying in fewer or more than two faces have
    no dihedral angle and are put in ``e_const`` by convention (also listed in
    ``boundary``).
    """
    _need_two(flex)
    const, moving, boundary = set(), set(), set()
    variation, angle_var = {}, {}
    triangular = all(len(f) == 3 for f in T.faces)
    for e in sorted_edges(T.edges):
        idxs = T.edge_faces[e]
        if len(idxs) != 2:
            boundary.add(e)
            const.add(e)
            continue
        fA, fB = (T.faces[i] for i in idxs)
        if triangular:
            (a,) = [v for v in fA if v not in e]
            (b,) = [v for v in fB if v not in e]
            variation[e] = relative_variation([s.distance(a, b) for s in flex.samples])
            try:
                angles = [dihedral_angle(s, e, a, b) for s in flex.samples]
                angle_var[e] = float(max(angles) - min(angles))
            except DegenerateError:
                angle_var[e] = float("nan")
        else:
            profiles = np.array([face_pair_profile(s, fA, fB) for s in flex.samples])
            top = profiles.max(axis=0)
            spread = profiles.max(axis=0) - profiles.min(axis=0)
            variation[e] = float((spread / np.where(top > 0, top, 1.0)).max())
        (const if variation[e] < tol else moving).add(e)
    return EdgeClassification(
        frozenset(const),
        frozenset(moving),
        variation,
        angle_var,
        frozenset(boundary),
        "opposite-distance" if triangular else "face-pair-profile",
    )


def faces_rigid(H, flex: SampledFlex, tol: float = DEFAULT_CONSTANCY_TOL) -> list:
    """Faces of ``H`` whose internal distances are *not* constant along ``flex``."""
    _need_two(flex)
    bad = []
    for f in H.faces:
        for i, u in enumerate(f):
            if any(relative_variation([s.distance(u, v) for s in flex.samples]) >= tol for v in f[i + 1:]):
                bad.append(tuple(f))
                break
    return bad
