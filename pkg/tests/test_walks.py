import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flexcycle import fixtures
from flexcycle.errors import AcyclicWalkError, ColoringError
from flexcycle.projective import FinChart, ProjectivePoint, embed_point, fin_membership
from flexcycle.skeleton import triangulate_fan
from flexcycle.walks import (
    BLUE,
    GOLD,
    RED,
    DistinguishedEdge,
    WalkPair,
    Walk,
    check_red_const_edge,
    color_vertices,
    coloring_from_colors,
    cycle_in_red_walk,
    red_achievable,
    red_blue_walks,
)

EQUATOR = {(0, 1), (1, 2), (2, 3), (0, 3)}


def octa_coloring(**overrides):
    colors = {v: RED for v in range(6)}
    colors[5] = BLUE
    colors.update({int(k[1:]): c for k, c in overrides.items()})
    return coloring_from_colors(colors, 5)


def test_color_examples():
    s = ProjectivePoint((1, 1j, 0, 7, 0))
    rho_inf = {
        "s": s,
        "a": embed_point((1, 2, 3)),
        "b": ProjectivePoint((2, 2j, 0, 9, 0)),
        "c": ProjectivePoint((0, 1, 1j, 4, 0)),
    }
    col = color_vertices(rho_inf, "s")
    assert col.colors == {"s": BLUE, "a": RED, "b": BLUE, "c": GOLD}


def test_color_errors():
    with pytest.raises(ColoringError):
        color_vertices({0: embed_point((1, 0, 0))}, 0)
    with pytest.raises(ColoringError):
        color_vertices({0: ProjectivePoint((1, 1j, 0, 7, 0)), 1: ProjectivePoint((1, 0, 0, 0, 1))}, 0)
    with pytest.raises(ColoringError):
        coloring_from_colors({0: "purple"})


def test_distinguished_edge(octa):
    T, _ = octa
    d = DistinguishedEdge.of(T, 0, 1, south=5)
    assert (d.south, d.north) == (5, 4)
    with pytest.raises(ColoringError):
        DistinguishedEdge.of(T, 0, 1, south=2)


def test_octahedron_hand_coloring(octa):
    T, _ = octa
    walks = red_blue_walks(T, octa_coloring(), (0, 5))
    assert walks.red_walk.vertices == {0, 1, 2, 3}
    assert walks.red_walk.edges == EQUATOR
    assert walks.blue_walk.vertices == {5}
    assert walks.blue_walk.edges == frozenset()
    assert walks.edge_class == {(0, 5), (1, 5), (2, 5), (3, 5)}
    cyc = cycle_in_red_walk(walks, (0, 1))
    assert set(cyc) == {0, 1, 2, 3}
    assert cyc[:2] == (0, 1)


def test_seed_must_be_red_blue(octa):
    T, _ = octa
    with pytest.raises(ColoringError):
        red_blue_walks(T, octa_coloring(), (0, 1))
    with pytest.raises(ColoringError):
        red_blue_walks(T, octa_coloring(), (0, 2))


def test_gold_vertex_splits_the_star(octa):
    T, _ = octa
    walks = red_blue_walks(T, octa_coloring(v2=GOLD), (0, 5))
    assert walks.red_walk.vertices == {0, 1, 3}
    assert walks.red_walk.edges == {(0, 1), (0, 3)}
    with pytest.raises(AcyclicWalkError):
        cycle_in_red_walk(walks, (0, 1))
    walks = red_blue_walks(T, octa_coloring(v0=GOLD, v2=GOLD), (1, 5))
    assert walks.edge_class == {(1, 5)}
    assert walks.red_walk.vertices == {1}


def test_cycle_in_theta_graph_is_shortest():
    # theta graph: paths 0-1 direct, 0-2-1, 0-3-4-1
    red = Walk(frozenset(range(5)), frozenset({(0, 1), (0, 2), (1, 2), (0, 3), (3, 4), (1, 4)}))
    wp = WalkPair(red, Walk(frozenset(), frozenset()), frozenset())
    assert cycle_in_red_walk(wp, (0, 1)) == (0, 1, 2)
    with pytest.raises(ColoringError):
        cycle_in_red_walk(wp, (2, 3))


def test_class_independent_of_face_order(octa, rng):
    T, _ = octa
    base = red_blue_walks(T, octa_coloring(v2=GOLD), (0, 5))
    for _ in range(10):
        order = rng.permutation(len(T.faces))
        assert red_blue_walks(T, octa_coloring(v2=GOLD), (0, 5), face_order=order) == base


def test_achievable_without_flips_is_red_walk(octa):
    T, _ = octa
    ach = red_achievable(T, octa_coloring(), (0, 5), frozenset())
    assert ach.vertices == {0, 1, 2, 3}
    assert ach.exhaustive and ach.states == 1
    assert all(seq == () for seq in ach.witnesses.values())


def test_achievable_grows_on_cube_diagonals():
    H, _ = fixtures.cube()
    T, diagonals = triangulate_fan(H)
    col = coloring_from_colors({v: (BLUE if v == 1 else RED) for v in range(8)}, 1)
    walks = red_blue_walks(T, col, (0, 1))
    assert walks.red_walk.vertices == {0, 3, 5, 7}
    ach = red_achievable(T, col, (0, 1), diagonals)
    assert ach.vertices == {0, 2, 3, 4, 5, 7}
    assert ach.exhaustive and ach.states == 64
    assert ach.witnesses[2] == ((0, 3),)
    assert ach.witnesses[4] == ((0, 5),)


def test_state_cap_truncates():
    H, _ = fixtures.cube()
    T, diagonals = triangulate_fan(H)
    col = coloring_from_colors({v: (BLUE if v == 1 else RED) for v in range(8)}, 1)
    ach = red_achievable(T, col, (0, 1), diagonals, state_cap=1)
    assert not ach.exhaustive
    assert ach.vertices == {0, 3, 5, 7}


def test_red_const_edge_reports(octa):
    T, _ = octa
    ok = check_red_const_edge(T, (0, 1), {0, 1, 2, 3})
    assert ok.passed and not ok.vacuous
    bad = check_red_const_edge(T, (0, 1), set(range(6)))
    assert not bad.passed
    assert {t[2] for t in bad.offending} == {4, 5}
    vac = check_red_const_edge(T, (0, 1), {0})
    assert vac.passed and vac.vacuous


def test_achievable_vertices_lie_in_fin():
    # synthetic rho_inf: s at infinity, reds on the plane of Fin_s, the rest gold
    H, _ = fixtures.cube()
    T, diagonals = triangulate_fan(H)
    p = ProjectivePoint((1, 1j, 0, 2, 0))
    chart = FinChart.from_point(p)
    rng = np.random.default_rng(7)
    rho_inf = {1: p}
    for v in (0, 2, 3, 4, 5, 7):
        x, z = rng.normal(size=2)
        y = (1.0 - x) / 1j  # x + i y = r_p / 2
        rho_inf[v] = embed_point((x, y, z))
    rho_inf[6] = ProjectivePoint((0, 1, 1j, 3, 0))
    col = color_vertices(rho_inf, 1)
    assert col[6] == GOLD and col[1] == BLUE
    ach = red_achievable(T, col, (0, 1), diagonals)
    assert ach.vertices
    assert all(fin_membership(chart, rho_inf[v], 1e-9) for v in ach.vertices)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from([RED, RED, GOLD, BLUE]), min_size=6, max_size=6), st.randoms())
def test_walk_properties(colors, rnd):
    T, _ = fixtures.octahedron()
    cols = dict(enumerate(colors))
    seeds = [e for e in sorted(T.edges) if {cols[e[0]], cols[e[1]]} == {RED, BLUE}]
    if not seeds:
        return
    col = coloring_from_colors(cols)
    w = red_blue_walks(T, col, seeds[0])
    order = list(range(len(T.faces)))
    rnd.shuffle(order)
    assert red_blue_walks(T, col, seeds[0], face_order=order) == w
    assert all(cols[v] == RED for v in w.red_walk.vertices)
    assert all(cols[v] == BLUE for v in w.blue_walk.vertices)
    assert red_achievable(T, col, seeds[0], ()).vertices == w.red_walk.vertices
