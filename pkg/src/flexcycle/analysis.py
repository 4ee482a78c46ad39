"""End-to-end pipeline: skeleton + realization (+ flex) -> zero-sum cycle report."""

from __future__ import annotations

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from . import __version__
from .cycles import Graph, find_zero_sum_cycle, verify_certificate
from .errors import FlexcycleError, SkeletonError
from .flex import (
    DEFAULT_CONSTANCY_TOL,
    DEFAULT_CORRECTOR_TOL,
    DEFAULT_RANK_TOL,
    ConstraintSystem,
    PinnedFrame,
    SampledFlex,
    classify_edges,
    default_pin,
    faces_rigid,
    flex_dimension,
    trace_flex,
    validate_flex,
)
from .geometry import DEFAULT_NONDEGENERACY_TOL, check_nondegenerate, edge_length_map
from .skeleton import (
    Polyhedron2Skeleton,
    TriangularSkeleton,
    min_vertex_anchor,
    sorted_edges,
    triangulate_fan,
    validate_skeleton,
)

logger = logging.getLogger(__name__)

NECESSARY_CONDITION_NOTE = (
    "A zero-sum cycle through an edge is a NECESSARY condition for that edge's dihedral angle "
    "to change along a flex of a polyhedron with non-degenerate triangles; finding one proves nothing. "
    "If no certificate exists up to max_len, no cycle of length <= max_len satisfies the condition."
)


class ValidationFailure(FlexcycleError):
    """Input rejected before any numerics (invalid skeleton, degenerate triangles, bad flex file)."""


class NumericalFailure(FlexcycleError):
    """A numerical assertion of the pipeline did not hold."""


@dataclass
class AnalysisOptions:
    max_len: int | None = None
    tol: float | None = None
    mode: str = "general"
    exact: bool = False
    step: float = 1e-2
    samples: int = 100
    pin: tuple | None = None
    constancy_tol: float = DEFAULT_CONSTANCY_TOL
    corrector_tol: float = DEFAULT_CORRECTOR_TOL
    rank_tol: float = DEFAULT_RANK_TOL
    nondegeneracy_tol: float = DEFAULT_NONDEGENERACY_TOL
    threads: int | None = None


def thread_count(requested=None) -> int:
    if requested:
        return max(1, int(requested))
    env = os.environ.get("FLEXCYCLE_THREADS")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def fan_triangles(H) -> TriangularSkeleton:
    """Fan triangulation without validity checks (for pin selection on open skeletons)."""
    if H.is_triangular:
        return TriangularSkeleton(H.vertices, H.faces)
    tris = []
    for f in H.faces:
        a = min_vertex_anchor(f)
        i = f.index(a)
        rot = f[i:] + f[:i]
        tris.extend((rot[0], rot[j], rot[j + 1]) for j in range(1, len(rot) - 1))
    return TriangularSkeleton(H.vertices, tuple(tris))


def make_pin(H, rho, pin=None) -> PinnedFrame:
    if pin is None:
        return default_pin(fan_triangles(H), rho)
    return PinnedFrame.from_realization(tuple(pin), rho)


def trace_for(H, rho, options: AnalysisOptions) -> SampledFlex:
    pin = make_pin(H, rho, options.pin)
    return trace_flex(
        H, rho, pin,
        step=options.step,
        max_samples=options.samples,
        corrector_tol=options.corrector_tol,
        rank_tol=options.rank_tol,
    )


@dataclass
class AnalysisReport:
    data: dict = field(default_factory=dict)

    @property
    def rigid(self) -> bool:
        return self.data["flex"]["status"] == "rigid"

    def certificates(self) -> dict:
        return {tuple(c["edge"]): c for c in self.data["certificates"]}


def _edge_json(e):
    return [e[0], e[1]]


def analyze(H: Polyhedron2Skeleton, rho, flex: SampledFlex | None = None,
            options: AnalysisOptions | None = None, source: str = "input") -> AnalysisReport:
    """Run validate -> triangulate -> non-degeneracy -> flex -> classify -> cycle search."""
    options = options or AnalysisOptions()
    if rho is None:
        raise ValidationFailure("input has no realization ('coordinates' field)")
    report = validate_skeleton(H)
    if not report.ok:
        raise ValidationFailure("invalid skeleton: " + "; ".join(i.message for i in report.issues))
    try:
        if H.is_triangular:
            T, diagonals = TriangularSkeleton(H.vertices, H.faces), frozenset()
        else:
            T, diagonals = triangulate_fan(H)
    except SkeletonError as exc:
        raise ValidationFailure(str(exc)) from None
    lengths = edge_length_map(T, rho)
    bad = check_nondegenerate(T, rho, options.nondegeneracy_tol)
    if bad:
        raise ValidationFailure("degenerate triangles: " + ", ".join(str(b.face) for b in bad))

    data = {
        "tool": {"name": "flexcycle", "version": __version__},
        "input": {
            "source": source,
            "vertices": len(H.vertices),
            "edges": len(H.edges),
            "faces": len(H.faces),
            "triangular": H.is_triangular,
            "triangles": len(T.faces),
            "diagonals": [_edge_json(e) for e in sorted_edges(diagonals)],
        },
        "tolerances": {
            "constancy": options.constancy_tol,
            "corrector": options.corrector_tol,
            "rank": options.rank_tol,
            "nondegeneracy": options.nondegeneracy_tol,
            "cycle": "exact" if options.exact else (options.tol if options.tol is not None else "1e-8 * max length on cycle"),
        },
        "search": {"mode": options.mode, "max_len": options.max_len or len(H.vertices), "exact": options.exact},
        "condition": NECESSARY_CONDITION_NOTE,
    }

    if flex is None:
        pin = make_pin(H, rho, options.pin)
        dim = flex_dimension(H, rho, pin, options.rank_tol)
        data["flex"] = {"status": None, "flex_dimension": dim, "pin": list(pin.triangle)}
        if dim == 0:
            data["flex"]["status"] = "rigid"
            data["classification"] = []
            data["certificates"] = []
            return AnalysisReport(data)
        flex = trace_for(H, rho, options)
        data["flex"]["status"] = "traced"
        data["flex"]["termination"] = flex.termination
    else:
        problems = validate_flex(H, flex, rho)
        if problems:
            raise ValidationFailure("supplied flex is invalid: " + "; ".join(problems[:5]))
        data["flex"] = {"status": "supplied"}
    system = ConstraintSystem.for_skeleton(H, rho, None)
    data["flex"]["samples"] = len(flex)
    data["flex"]["max_length_residual"] = max(
        float(system.length_residuals(s.array(system.order).ravel()).max(initial=0.0)) for s in flex.samples
    )

    if H.is_triangular:
        cls = classify_edges(T, flex, options.constancy_tol)
        e_const, moving = cls.e_const, cls.e_moving
        tri_cls = cls
    else:
        loose = faces_rigid(H, flex, options.constancy_tol)
        if loose:
            raise NumericalFailure(f"faces are not rigid along the flex: {loose[:3]}")
        cls = classify_edges(H, flex, options.constancy_tol)
        tri_cls = classify_edges(T, flex, options.constancy_tol)
        unexpected = sorted_edges(diagonals & tri_cls.e_moving)
        if unexpected:
            raise NumericalFailure(f"fan diagonals with varying dihedral angle: {unexpected}")
        e_const, moving = cls.e_const | diagonals, cls.e_moving

    rows = []
    for e in sorted_edges(T.edges):
        src = tri_cls if e in diagonals else cls
        rows.append({
            "edge": _edge_json(e),
            "class": "moving" if e in moving else "const",
            "diagonal": e in diagonals,
            "variation": float(src.variation.get(e, 0.0)),
        })
    data["classification"] = rows

    forbidden = frozenset(e_const | diagonals)
    if options.exact:
        lam = {e: Fraction(v) for e, v in lengths.items()}
    else:
        lam = dict(lengths.items())
    G = Graph.of(T)

    def search(e):
        avoid = T.opposite_vertices(e) if options.mode == "induced" else ()
        cert = find_zero_sum_cycle(
            G, lam, e, forbidden, options.max_len or len(H.vertices), options.tol,
            options.mode, options.exact, avoid,
        )
        entry = {"edge": _edge_json(e)}
        if cert is None:
            entry["status"] = "none up to max_len"
            return entry
        if not verify_certificate(cert, lam, forbidden, options.tol):
            raise NumericalFailure(f"certificate for {e} failed independent verification")
        entry["status"] = "certificate"
        entry["certificate"] = cert.to_dict()
        entry["length"] = len(cert.cycle)
        return entry

    edges = sorted_edges(moving)
    with ThreadPoolExecutor(max_workers=thread_count(options.threads)) as pool:
        data["certificates"] = list(pool.map(search, edges))
    return AnalysisReport(data)

