"""``flexcycle`` command line.

Exit codes: 0 success, 2 validation failure, 3 rigid when a flex is
required, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .analysis import AnalysisOptions, NumericalFailure, ValidationFailure, analyze, trace_for
from .cycles import CycleCertificate, verify_certificate
from .errors import (
    ColoringError,
    DegenerateError,
    FlexError,
    FlipError,
    FormatError,
    ProjectiveError,
    RigidError,
    SkeletonError,
)
from .flips import flip_sequence
from .geometry import edge_length_map
from .projective import FinChart, fin_membership
from .skeleton import TriangularSkeleton, edge, sorted_edges, sorted_vertices, triangulate_fan
from .walks import (
    RED,
    DistinguishedEdge,
    check_red_const_edge,
    color_vertices,
    coloring_from_colors,
    cycle_in_red_walk,
    red_achievable,
    red_blue_walks,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_RIGID = 3
EXIT_NUMERICAL = 4

log = logging.getLogger("flexcycle")


def _emit(doc, out):
    text = io.dumps_canonical(doc) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _vertex(H, token):
    lookup = {str(v): v for v in H.vertices}
    if token not in lookup:
        raise FormatError(f"unknown vertex {token!r}")
    return lookup[token]


def _triangulated(H):
    if H.is_triangular:
        return TriangularSkeleton(H.vertices, H.faces), frozenset()
    return triangulate_fan(H)


def _options(args) -> AnalysisOptions:
    return AnalysisOptions(
        max_len=getattr(args, "max_len", None),
        tol=getattr(args, "tol", None),
        mode=getattr(args, "mode", "general"),
        exact=getattr(args, "exact", False),
        step=args.step,
        samples=args.samples,
        pin=args.pin,
    )


def cmd_analyze(args) -> int:
    H, rho = io.load_skeleton(args.input)
    if args.pin:
        args.pin = tuple(_vertex(H, t) for t in args.pin)
    flex = None
    if args.flex:
        flex = io.parse_flex_document(io.load_json(args.flex), H.vertices, args.flex)
    report = analyze(H, rho, flex, _options(args), source=str(args.input))
    _emit(report.data, args.out)
    return EXIT_OK


def cmd_flex(args) -> int:
    H, rho = io.load_skeleton(args.input)
    if rho is None:
        raise ValidationFailure("input has no realization ('coordinates' field)")
    if args.pin:
        args.pin = tuple(_vertex(H, t) for t in args.pin)
    flex = trace_for(H, rho, _options(args))
    _emit(io.flex_document(flex), args.out)
    return EXIT_OK


def _load_coloring(args, T):
    colors, rho_inf, s = io.parse_coloring_document(io.load_json(args.coloring), T.vertices, args.coloring)
    if rho_inf is not None:
        return color_vertices(rho_inf, s), rho_inf
    missing = [v for v in T.vertices if v not in colors]
    if missing:
        raise ColoringError(f"coloring lacks vertices {missing}")
    return coloring_from_colors(colors, s), None


def cmd_walks(args) -> int:
    H, _ = io.load_skeleton(args.input)
    T, _ = _triangulated(H)
    coloring, rho_inf = _load_coloring(args, T)
    w1, s = (_vertex(H, t) for t in args.seed)
    seed = edge(w1, s)
    walks = red_blue_walks(T, coloring, seed)
    out = {
        "colors": {str(v): coloring[v] for v in T.vertices},
        "seed": [w1, s],
        "red_walk": {
            "vertices": sorted_vertices(walks.red_walk.vertices),
            "edges": [list(e) for e in sorted_edges(walks.red_walk.edges)],
        },
        "blue_walk": {
            "vertices": sorted_vertices(walks.blue_walk.vertices),
            "edges": [list(e) for e in sorted_edges(walks.blue_walk.edges)],
        },
    }
    if args.w2 is not None:
        w2 = _vertex(H, args.w2)
    else:
        candidates = [u for u in T.opposite_vertices(seed) if coloring[u] == RED]
        w2 = sorted_vertices(candidates)[0] if candidates else None
    if w2 is not None:
        dist = DistinguishedEdge.of(T, w1, w2, south=s)
        out["distinguished"] = {"edge": [w1, w2], "s": dist.south, "n": dist.north}
        try:
            out["cycle"] = list(cycle_in_red_walk(walks, (w1, w2)))
        except ColoringError as exc:
            out["cycle"] = None
            out["cycle_error"] = str(exc)
    e_const = frozenset()
    if args.e_const:
        e_const = io.parse_edge_list(io.load_json(args.e_const), T.vertices, args.e_const)
    ach = red_achievable(T, coloring, seed, e_const, args.state_cap)
    out["red_achievable"] = {
        "vertices": sorted_vertices(ach.vertices),
        "witnesses": {str(v): [list(e) for e in seq] for v, seq in ach.witnesses.items()},
        "exhaustive": ach.exhaustive,
        "states": ach.states,
    }
    checks = []
    for e in sorted_edges(e_const):
        r = check_red_const_edge(T, e, ach.vertices)
        checks.append({"edge": list(e), "passed": r.passed, "vacuous": r.vacuous,
                       "offending": [list(t) for t in r.offending]})
    out["red_const_checks"] = checks
    if rho_inf is not None:
        chart = FinChart.from_point(rho_inf[s])
        out["fin_membership"] = {str(v): fin_membership(chart, rho_inf[v]) for v in sorted_vertices(ach.vertices)}
    _emit(out, args.out)
    return EXIT_OK


def cmd_flip(args) -> int:
    H, rho = io.load_skeleton(args.input)
    if not H.is_triangular:
        raise ValidationFailure("flip needs a triangular skeleton; run 'triangulate' first")
    seq = [(_vertex(H, a), _vertex(H, b)) for a, b in args.edge]
    T = flip_sequence(TriangularSkeleton(H.vertices, H.faces), seq)
    _emit(io.skeleton_document(T, rho), args.out)
    return EXIT_OK


def cmd_triangulate(args) -> int:
    H, rho = io.load_skeleton(args.input)
    T, diagonals = _triangulated(H)
    doc = io.skeleton_document(T, rho)
    doc["diagonals"] = [list(e) for e in sorted_edges(diagonals)]
    _emit(doc, args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    H, rho = io.load_skeleton(args.input)
    if rho is None:
        raise ValidationFailure("input has no realization ('coordinates' field)")
    T, _ = _triangulated(H)
    lengths = edge_length_map(T, rho)
    doc = io.load_json(args.certificate)
    if "certificates" in doc:
        certs = [c["certificate"] for c in doc["certificates"] if "certificate" in c]
    else:
        certs = [doc]
    results = []
    for c in certs:
        cert = CycleCertificate.from_dict(c)
        results.append(verify_certificate(cert, lengths, cert.avoided, args.tol))
    _emit({"verified": all(results), "results": results}, args.out)
    return EXIT_OK if all(results) else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="flexcycle", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("input", help="skeleton JSON or OFF file")
        sp.add_argument("--out", help="write output here instead of stdout")

    def tracing(sp):
        sp.add_argument("--step", type=float, default=1e-2)
        sp.add_argument("--samples", type=int, default=100)
        sp.add_argument("--pin", nargs=3, metavar=("W1", "W2", "N"))

    a = sub.add_parser("analyze", help="classify edges and certify zero-sum cycles")
    common(a)
    tracing(a)
    a.add_argument("--flex", help="use this SampledFlex JSON instead of tracing")
    a.add_argument("--max-len", type=int)
    a.add_argument("--tol", type=float)
    a.add_argument("--mode", choices=("general", "induced"), default="general")
    a.add_argument("--exact", action="store_true", help="exact rational sign search")
    a.set_defaults(func=cmd_analyze)

    f = sub.add_parser("flex", help="trace a flex and write it as JSON")
    common(f)
    tracing(f)
    f.set_defaults(func=cmd_flex)

    w = sub.add_parser("walks", help="red/blue walks for a coloring or rho_infinity")
    common(w)
    w.add_argument("--coloring", required=True)
    w.add_argument("--seed", nargs=2, required=True, metavar=("W1", "S"))
    w.add_argument("--w2", help="second endpoint of the distinguished edge")
    w.add_argument("--e-const", dest="e_const")
    w.add_argument("--state-cap", type=int, default=100_000)
    w.set_defaults(func=cmd_walks)

    fl = sub.add_parser("flip", help="flip a sequence of edges")
    common(fl)
    fl.add_argument("--edge", nargs=2, action="append", required=True, metavar=("U", "V"))
    fl.set_defaults(func=cmd_flip)

    t = sub.add_parser("triangulate", help="fan-triangulate all faces")
    common(t)
    t.set_defaults(func=cmd_triangulate)

    v = sub.add_parser("verify", help="re-check certificates against the input lengths")
    common(v)
    v.add_argument("certificate", help="certificate JSON or an analyze report")
    v.add_argument("--tol", type=float)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except RigidError as exc:
        log.error("%s", exc)
        return EXIT_RIGID
    except (FlexError, NumericalFailure) as exc:
        log.error("%s", exc)
        return EXIT_NUMERICAL
    except (ValidationFailure, FormatError, SkeletonError, FlipError, DegenerateError,
            ColoringError, ProjectiveError, OSError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
