import math

import numpy as np
import pytest

from flexcycle import fixtures
from flexcycle.errors import InsufficientSamplesError, RigidError
from flexcycle.flex import (
    ConstraintSystem,
    PinnedFrame,
    SampledFlex,
    classify_edges,
    constant_distance_pairs,
    constraint_pairs,
    default_pin,
    faces_rigid,
    flex_dimension,
    kernel_basis,
    trace_flex,
    validate_flex,
)
from flexcycle.geometry import Realization, dihedral_angle
from flexcycle.skeleton import TriangularSkeleton


def fd_jacobian(system, x, h=1e-6):
    cols = []
    for i in range(x.size):
        d = np.zeros_like(x)
        d[i] = h
        cols.append((system.residuals(x + d) - system.residuals(x - d)) / (2 * h))
    return np.array(cols).T


def test_jacobian_matches_central_differences(octa, rng):
    T, rho = octa
    system = ConstraintSystem.for_skeleton(T, rho, default_pin(T, rho))
    x = rng.normal(size=18)
    assert np.allclose(system.jacobian(x), fd_jacobian(system, x), atol=1e-7)


def test_volume_rows_match_central_differences(rng):
    H, rho = fixtures.cube()
    system = ConstraintSystem.for_skeleton(H, rho, PinnedFrame.from_realization((0, 1, 2), rho))
    assert len(system.volumes) == 6
    assert np.allclose(system.residuals(rho.array().ravel()), 0.0)
    x = rng.normal(size=24)
    assert np.allclose(system.jacobian(x), fd_jacobian(system, x), atol=1e-7)


def test_quad_hinge_has_one_flex():
    H, rho = fixtures.quad_hinge()
    pin = PinnedFrame.from_realization((0, 1, 2), rho)
    assert flex_dimension(H, rho, pin) == 1
    flex = trace_flex(H, rho, pin, max_samples=20)
    assert validate_flex(H, flex, rho) == []
    assert faces_rigid(H, flex) == []


def test_pin_rows(octa):
    T, rho = octa
    pin = default_pin(T, rho)
    assert pin.triangle == (0, 1, 4)
    system = ConstraintSystem.for_skeleton(T, rho, pin)
    Jm = system.jacobian(rho.array().ravel())
    assert Jm.shape == (12 + 9, 18)
    assert np.allclose(system.residuals(rho.array().ravel()), 0.0)


def test_flex_dimensions(octa, bricard):
    T, rho = octa
    assert flex_dimension(T, rho, default_pin(T, rho)) == 0
    T, rho = bricard
    assert flex_dimension(T, rho, default_pin(T, rho)) == 1
    tri = TriangularSkeleton.from_faces([(0, 1, 2), (0, 1, 2)])
    r = Realization({0: (0, 0, 0), 1: (1, 0, 0), 2: (0, 1, 0)})
    assert flex_dimension(tri, r, PinnedFrame.from_realization((0, 1, 2), r)) == 0


def test_hinge_has_one_flex(hinge_flex):
    T, rho, _ = hinge_flex
    pin = PinnedFrame.from_realization((0, 1, 2), rho)
    assert flex_dimension(T, rho, pin) == 1


def test_non_triangular_faces_are_rigid_bodies():
    H, rho = fixtures.cube()
    pairs = constraint_pairs(H)
    assert len(pairs) == 12 + 12  # edges plus two diagonals per quad
    pin = PinnedFrame.from_realization((0, 1, 2), rho)
    assert flex_dimension(H, rho, pin) == 0
    # the bare edge frame of the cube (no face closure) is floppy
    bars = ConstraintSystem(rho.order, sorted(H.edges), [1.0] * 12, pin)
    assert kernel_basis(bars.jacobian(rho.array().ravel())).shape[1] >= 3


def test_rigid_raises(octa):
    T, rho = octa
    with pytest.raises(RigidError):
        trace_flex(T, rho)


def test_bricard_trace(bricard_flex):
    T, rho, flex = bricard_flex
    assert len(flex) == 100
    assert flex.parameters[0] == 0.0
    assert all(b > a for a, b in zip(flex.parameters, flex.parameters[1:]))
    assert flex.parameters[-1] < 1.0
    assert validate_flex(T, flex, rho) == []
    lengths0 = {e: rho.distance(*e) for e in T.edges}
    worst = max(abs(s.distance(*e) - L) for s in flex.samples for e, L in lengths0.items())
    assert worst < 1e-9


def test_hinge_sweep_is_monotone(hinge_flex):
    T, rho, flex = hinge_flex
    angles = [dihedral_angle(s, (0, 1), 2, 3) for s in flex.samples]
    assert angles[0] == pytest.approx(math.pi / 2, abs=1e-12)
    diffs = np.diff(angles)
    assert np.all(diffs > 0) or np.all(diffs < 0)
    for s in flex.samples:
        for v in (0, 1, 2):
            assert np.allclose(s[v], rho[v], atol=1e-10)


def test_direction_flag_reverses(hinge_flex):
    T, rho, flex = hinge_flex
    pin = PinnedFrame.from_realization((0, 1, 2), rho)
    back = trace_flex(T, rho, pin, max_samples=5, direction=-1)
    a_fwd = dihedral_angle(flex.samples[1], (0, 1), 2, 3) - math.pi / 2
    a_back = dihedral_angle(back.samples[1], (0, 1), 2, 3) - math.pi / 2
    assert a_fwd * a_back < 0


def test_pinning_invariance_under_rotation(bricard, rng):
    T, rho = bricard
    pin = default_pin(T, rho)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    R = q * np.sign(np.linalg.det(q))
    t = rng.normal(size=3)
    f1 = trace_flex(T, rho, pin, max_samples=20)
    f2 = trace_flex(T, rho.transformed(R, t), pin.transformed(R, t), max_samples=20)
    assert np.allclose(f1.parameters, f2.parameters, atol=1e-8)
    for s1, s2 in zip(f1.samples, f2.samples):
        assert np.allclose(s1.distance_matrix(), s2.distance_matrix(), atol=1e-8)


def test_pin_rejects_degenerate():
    r = Realization({0: (0, 0, 0), 1: (1, 0, 0), 2: (2, 0, 0)})
    with pytest.raises(ValueError):
        PinnedFrame.from_realization((0, 1, 2), r)


def test_classify_bricard(bricard_flex):
    T, _, flex = bricard_flex
    cls = classify_edges(T, flex)
    assert cls.e_moving == T.edges
    assert cls.e_const == frozenset()


def test_classify_hinge(hinge_flex):
    T, _, flex = hinge_flex
    cls = classify_edges(T, flex)
    assert cls.e_moving == {(0, 1)}
    assert cls.boundary == {(0, 2), (1, 2), (0, 3), (1, 3)}
    assert cls.boundary <= cls.e_const


def test_classify_needs_two_samples(bricard):
    T, rho = bricard
    with pytest.raises(InsufficientSamplesError):
        classify_edges(T, SampledFlex([0.0], [rho]))
    with pytest.raises(InsufficientSamplesError):
        constant_distance_pairs(T.vertices, SampledFlex([0.0], [rho]))


def test_constant_distance_pairs_hinge(hinge_flex):
    T, _, flex = hinge_flex
    pairs = constant_distance_pairs(T.vertices, flex)
    assert pairs == {(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)}


def test_constant_distance_pairs_bricard(bricard_flex):
    T, _, flex = bricard_flex
    pairs = constant_distance_pairs(T.vertices, flex)
    assert pairs == T.edges


def test_classification_consistent_with_dihedral(bricard_flex):
    T, _, flex = bricard_flex
    cls = classify_edges(T, flex)
    for e in T.edges:
        assert (cls.angle_variation[e] > 1e-6) == (e in cls.e_moving)


def test_faces_rigid_on_congruent_samples():
    H, rho = fixtures.cube()
    R = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    flex = SampledFlex([0.0, 0.5], [rho, rho.transformed(R, (1.0, 2.0, 3.0))])
    assert faces_rigid(H, flex) == []
    cls = classify_edges(H, flex)
    assert cls.e_const == H.edges and cls.criterion == "face-pair-profile"


def test_validate_flex_reports_problems(bricard_flex):
    T, rho, flex = bricard_flex
    bad = SampledFlex(flex.parameters[:3], [flex.samples[0], flex.samples[0], flex.samples[2]])
    assert any("congruent" in p for p in validate_flex(T, bad))
    wrong = SampledFlex([0.0, 0.1], [rho, rho.transformed(np.eye(3) * 1.1)])
    assert any("deviates" in p for p in validate_flex(T, wrong))
    assert validate_flex(T, SampledFlex([0.2, 0.1], flex.samples[:2]))
