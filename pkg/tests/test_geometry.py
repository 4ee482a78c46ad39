import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flexcycle import fixtures
from flexcycle.errors import DegenerateError
from flexcycle.geometry import (
    Realization,
    check_nondegenerate,
    dihedral_angle,
    edge_length_map,
    face_pair_profile,
)
from flexcycle.skeleton import Polyhedron2Skeleton, TriangularSkeleton


def _normal_angle(p, q, a, b):
    # independent oracle: angle between outward face normals, then pi - that
    n1 = np.cross(q - p, a - p)
    n2 = np.cross(b - p, q - p)
    c = n1 @ n2 / (np.linalg.norm(n1) * np.linalg.norm(n2))
    return math.pi - math.acos(max(-1.0, min(1.0, c)))


def test_edge_lengths_simple():
    rho = Realization({0: (0, 0, 0), 1: (1, 0, 0), 2: (0, 3, 0), 3: (0, 1, 1)})
    G = Polyhedron2Skeleton.from_faces([(0, 1, 2), (0, 2, 3)])
    lam = edge_length_map(G, rho)
    assert lam[(0, 1)] == 1.0
    assert lam[(2, 0)] == 3.0
    assert lam[(0, 3)] == pytest.approx(math.sqrt(2), abs=1e-15)


def test_edge_lengths_reject_coincident():
    rho = Realization({0: (0, 0, 0), 1: (0, 0, 0), 2: (1, 0, 0)})
    G = Polyhedron2Skeleton.from_faces([(0, 1, 2)])
    with pytest.raises(DegenerateError):
        edge_length_map(G, rho)


def test_dihedral_flat_and_folded():
    rho = Realization({0: (0, 0, 0), 1: (1, 0, 0), 2: (0.3, 1, 0), 3: (0.7, -1, 0), 4: (0.2, 2, 0)})
    assert dihedral_angle(rho, (0, 1), 2, 3) == pytest.approx(math.pi, abs=1e-12)
    assert dihedral_angle(rho, (0, 1), 2, 4) == pytest.approx(0.0, abs=1e-12)


def test_dihedral_regular_tetrahedron():
    s = 1 / math.sqrt(2)
    rho = Realization({0: (1, 0, -s), 1: (-1, 0, -s), 2: (0, 1, s), 3: (0, -1, s)})
    got = dihedral_angle(rho, (0, 1), 2, 3)
    assert got == pytest.approx(math.acos(1 / 3), abs=1e-12)
    assert got == pytest.approx(_normal_angle(*(rho[v] for v in (0, 1, 2, 3))), abs=1e-12)


def test_dihedral_collinear_face_rejected():
    rho = Realization({0: (0, 0, 0), 1: (1, 0, 0), 2: (2, 0, 0), 3: (0, 1, 0)})
    with pytest.raises(DegenerateError):
        dihedral_angle(rho, (0, 1), 2, 3)


def test_hinge_dihedral_matches_construction():
    for angle in (0.3, 1.0, math.pi / 2, 2.5):
        _, rho = fixtures.hinge(angle)
        assert dihedral_angle(rho, (0, 1), 2, 3) == pytest.approx(angle, abs=1e-12)


def test_face_pair_profile_two_unit_squares():
    # two unit squares sharing edge {0, 1} at a right angle
    rho = Realization({
        0: (0, 0, 0), 1: (1, 0, 0), 2: (1, 1, 0), 3: (0, 1, 0),
        4: (1, 0, 1), 5: (0, 0, 1),
    })
    prof = face_pair_profile(rho, (0, 1, 2, 3), (1, 0, 5, 4))
    expected = sorted([1.0] * 5 + [math.sqrt(2)] * 6 + [math.sqrt(3)] * 2)
    assert np.allclose(prof, expected, atol=1e-15)


def test_face_pair_profile_octahedron_faces():
    T, rho = fixtures.octahedron()
    prof = face_pair_profile(rho, (4, 0, 1), (5, 1, 0))
    # distinct pairs: {0,1}, {0,5}, {1,5}, {0,4}, {1,4}, {4,5}
    assert np.allclose(prof, [math.sqrt(2)] * 5 + [2.0], atol=1e-15)


def test_nondegenerate_examples(octa):
    T, rho = octa
    assert check_nondegenerate(T, rho) == []
    flat = Realization({0: (0, 0, 0), 1: (1, 0, 0), 2: (2, 0, 0), 3: (0, 1, 0)})
    H = TriangularSkeleton.from_faces([(0, 1, 2), (0, 1, 3)])
    bad = check_nondegenerate(H, flat)
    assert [b.face for b in bad] == [(0, 1, 2)]
    assert bad[0].area == 0.0


def _rotation(draw_floats):
    q = np.array(draw_floats, dtype=float)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
        [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
        [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
    ])


quat = st.lists(st.floats(-1, 1), min_size=4, max_size=4).filter(lambda q: sum(c * c for c in q) > 0.1)
shift = st.lists(st.floats(-5, 5), min_size=3, max_size=3)


@settings(max_examples=60, deadline=None)
@given(quat, shift)
def test_isometry_invariance(q, t):
    T, rho = fixtures.bricard_type1()
    R = _rotation(q)
    rho2 = rho.transformed(R, t)
    lam, lam2 = edge_length_map(T, rho), edge_length_map(T, rho2)
    for e in T.edges:
        assert lam2[e] == pytest.approx(lam[e], rel=1e-12)
        a, b = T.opposite_vertices(e)
        assert dihedral_angle(rho2, e, a, b) == pytest.approx(dihedral_angle(rho, e, a, b), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-3, 3), min_size=12, max_size=12))
def test_dihedral_matches_normal_oracle(coords):
    P = np.array(coords).reshape(4, 3)
    rho = Realization(dict(enumerate(P)))
    for a in (2, 3):
        area = np.linalg.norm(np.cross(P[1] - P[0], P[a] - P[0]))
        if area < 1e-2 or np.linalg.norm(P[1] - P[0]) < 1e-2:
            return
    got = dihedral_angle(rho, (0, 1), 2, 3)
    assert 0.0 <= got <= math.pi
    assert got == pytest.approx(_normal_angle(*P), abs=1e-7)


def test_profile_constant_iff_dihedral_constant(hinge_flex):
    T, rho, flex = hinge_flex
    angles = [dihedral_angle(s, (0, 1), 2, 3) for s in flex.samples]
    profiles = [face_pair_profile(s, (0, 1, 2), (0, 1, 3)) for s in flex.samples]
    assert max(angles) - min(angles) > 1e-3
    assert max(np.abs(p - profiles[0]).max() for p in profiles) > 1e-3
