import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flexcycle import fixtures
from flexcycle.analysis import make_pin
from flexcycle.errors import FlipError
from flexcycle.flex import SampledFlex, classify_edges, trace_flex
from flexcycle.flips import (
    augmented_graph,
    check_independent,
    flip,
    flip_all,
    flip_sequence,
    quadrilateral,
    verify_flip_properties,
)
from flexcycle.skeleton import TriangularSkeleton, edge, triangulate_fan, validate_skeleton


@pytest.fixture(scope="module")
def quad_hinge_setup():
    H, rho = fixtures.quad_hinge()
    # quad_hinge is open, so triangulate_fan refuses it; same fan by hand
    T = TriangularSkeleton.from_faces([(0, 1, 2), (0, 2, 3), (0, 5, 4), (0, 4, 1)])
    flex = trace_flex(H, rho, make_pin(H, rho), max_samples=30)
    return H, T, rho, flex


def test_octahedron_equator_flip(octa):
    T, _ = octa
    assert quadrilateral(T, (0, 1)) == (0, 1, 4, 5)
    T2 = flip(T, (0, 1))
    assert (0, 1) not in T2.edges and (4, 5) in T2.edges
    assert len(T2.edges) == 12
    assert validate_skeleton(T2).ok
    assert {frozenset(f) for f in T2.faces} - {frozenset(f) for f in T.faces} == {
        frozenset((4, 5, 0)), frozenset((4, 5, 1))}


def test_flip_involution(octa):
    T, _ = octa
    for e in T.edges:
        v1, v2, u1, u2 = quadrilateral(T, e)
        assert flip(flip(T, e), (u1, u2)) == T


def test_flip_rejects_non_edge_and_boundary(octa, hinge_flex):
    T, _ = octa
    with pytest.raises(FlipError):
        flip(T, (0, 2))
    H, _, _ = hinge_flex
    with pytest.raises(FlipError):
        flip(H, (0, 2))


def test_flip_rejects_doubled_edge():
    # two tetrahedra glued: flipping an edge of degree 3 recreates an existing edge
    T = TriangularSkeleton.from_faces([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])
    with pytest.raises(FlipError, match="doubled"):
        flip(T, (0, 1))


def test_flip_sequence_names_failing_index(octa):
    T, _ = octa
    with pytest.raises(FlipError, match="flip 1"):
        flip_sequence(T, [(0, 1), (0, 1)])
    assert flip_sequence(T, []) is T


def test_flip_all_cube_diagonals_order_free():
    H, _ = fixtures.cube()
    T, diagonals = triangulate_fan(H)
    assert check_independent(T, diagonals) == []
    ref = flip_all(T, diagonals)
    for perm in itertools.permutations(sorted(diagonals)[:4]):
        rest = sorted(diagonals)[4:]
        assert flip_sequence(T, list(perm) + rest) == ref
    assert not (ref.edges & diagonals)


def test_flip_all_rejects_dependent(octa):
    T, _ = octa
    assert check_independent(T, [(0, 1), (1, 2)])
    with pytest.raises(FlipError):
        flip_all(T, [(0, 1), (1, 2)])


def test_augmented_graph_examples(bricard_flex, hinge_flex):
    T, _, flex = bricard_flex
    assert augmented_graph(T, flex).extra == frozenset()
    T, _, flex = hinge_flex
    aug = augmented_graph(T, flex)
    assert aug.edges == T.edges and aug.extra == frozenset()
    _, rho = fixtures.octahedron()
    still = SampledFlex([0.0, 0.5], [rho, rho.transformed(np.eye(3), (1.0, 0.0, 0.0))])
    aug = augmented_graph(TriangularSkeleton.from_faces(fixtures.OCTAHEDRON_FACES), still)
    assert aug.extra == {(0, 2), (1, 3), (4, 5)}


def test_quad_hinge_flips_keep_properties(quad_hinge_setup):
    H, T, rho, flex = quad_hinge_setup
    cls = classify_edges(T, flex)
    assert cls.e_moving == {(0, 1)}
    for seq in ([], [(0, 2)], [(0, 4)], [(0, 2), (0, 4)], [(0, 2), (1, 3)]):
        Tf = flip_sequence(T, seq)
        report = verify_flip_properties(T, Tf, flex, cls.e_const)
        assert report.ok, (seq, report)


def test_hinge_moving_flip_breaks_lengths(hinge_flex):
    T, _, flex = hinge_flex
    report = verify_flip_properties(T, flip(T, (0, 1)), flex, frozenset())
    assert "b" in report.failed_checks()
    assert report.flex == [(2, 3)]
    assert report.subgraph == [(2, 3)]


octa_edges = st.sampled_from(sorted(fixtures.octahedron()[0].edges))


@settings(max_examples=50, deadline=None)
@given(st.lists(octa_edges, max_size=4))
def test_flip_preserves_counts(seq):
    T, _ = fixtures.octahedron()
    for e in seq:
        try:
            T2 = flip(T, e)
        except FlipError:
            continue
        assert len(T2.edges) == len(T.edges) and len(T2.faces) == len(T.faces)
        v1, v2, u1, u2 = quadrilateral(T, e)
        assert flip(T2, edge(u1, u2)) == T
        T = T2
