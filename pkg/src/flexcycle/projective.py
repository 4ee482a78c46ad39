"""The quadric ``M: x^2 + y^2 + z^2 - r h = 0`` in complex P^4 and the sets Fin_p.

For ``p = (p_vec : r_p : 0)`` on ``M`` at infinity, ``p_vec`` is isotropic
(``p_vec . p_vec = 0``, complex bilinear dot).  Points of ``Fin_p`` in the
chart ``h = 1`` lie on the affine plane ``q . p_vec = r_p / 2``, whose
direction space is the bilinear complement of ``p_vec``.  That complement
contains ``p_vec`` itself, so the quadratic form restricted to it has rank
one: for a unit vector ``u`` with ``u . p_vec = 0`` and any difference
``d = a p_vec + b u`` we get ``d . d = b^2``.  The signed length of a
difference is therefore the linear functional ``d . u``.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import InconsistentLengthsError, NonRealSignedLengthError, ProjectiveError

DEFAULT_TOL = 1e-10
EXCEPTIONAL = (0, 0, 0, 1, 0)

ON_M_FINITE = "on_M_finite"
ON_M_INFINITY = "on_M_infinity"
OFF_M = "off_M"


def bdot(a, b) -> complex:
    """Complex bilinear (not Hermitian) dot product."""
    return complex(np.sum(np.asarray(a, dtype=complex) * np.asarray(b, dtype=complex)))


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """Homogeneous coordinates ``(x : y : z : r : h)``."""

    coords: tuple

    def __post_init__(self):
        c = tuple(complex(v) for v in self.coords)
        if len(c) != 5:
            raise ProjectiveError("projective points in P^4 need 5 coordinates")
        if all(v == 0 for v in c):
            raise ProjectiveError("the zero vector is not a projective point")
        object.__setattr__(self, "coords", c)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=complex)

    def normalized(self, tol: float = DEFAULT_TOL) -> np.ndarray:
        """Coordinates scaled so the first non-negligible coordinate is 1."""
        a = self.array
        big = np.abs(a).max()
        for v in a:
            if abs(v) > tol * big:
                return a / v
        raise ProjectiveError("zero vector")  # unreachable after __post_init__

    def scaled(self) -> np.ndarray:
        """Coordinates scaled to unit max-modulus; used for tolerance tests."""
        a = self.array
        return a / np.abs(a).max()

    def __eq__(self, other):
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        return bool(np.allclose(self.normalized(), other.normalized(), rtol=0, atol=DEFAULT_TOL))

    __hash__ = None

    def affine(self) -> np.ndarray:
        """``(x, y, z)`` in the chart ``h = 1``."""
        h = self.coords[4]
        if h == 0:
            raise ProjectiveError("point at infinity has no affine part")
        return self.array[:3] / h

    def to_json(self) -> list:
        return [[v.real, v.imag] for v in self.coords]

    @classmethod
    def from_json(cls, data) -> "ProjectivePoint":
        return cls(tuple(complex(re, im) for re, im in data))


def embed_point(q) -> ProjectivePoint:
    """``(x, y, z) -> (x : y : z : x^2 + y^2 + z^2 : 1)``."""
    q = np.asarray(q, dtype=complex).reshape(3)
    return ProjectivePoint((q[0], q[1], q[2], bdot(q, q), 1.0))


def quadric_value(P: ProjectivePoint) -> complex:
    x, y, z, r, h = P.scaled()
    return x * x + y * y + z * z - r * h


def classify_point(P: ProjectivePoint, tol: float = DEFAULT_TOL) -> str:
    if abs(quadric_value(P)) > tol:
        return OFF_M
    if abs(P.scaled()[4]) <= tol:
        return ON_M_INFINITY
    return ON_M_FINITE


def _is_exceptional(P: ProjectivePoint, tol: float) -> bool:
    a = P.scaled()
    return bool(np.all(np.abs(a[[0, 1, 2, 4]]) <= tol))


def companion_direction(p_vec) -> np.ndarray:
    """Unit vector ``u`` with ``u . p_vec = 0``, deterministic.

    Gram-Schmidt against an isotropic vector would divide by ``p_vec . p_vec
    = 0``.  Instead take the standard basis vector ``c`` with the largest
    ``|c . p_vec|`` (first on ties): ``c x p_vec`` is orthogonal to
    ``p_vec`` and squares to ``-(c . p_vec)^2``, and is normalized with the
    principal square root.  Picking the largest coordinate keeps ``|u|``
    bounded.
    """
    p_vec = np.asarray(p_vec, dtype=complex)
    i = int(np.argmax(np.abs(p_vec)))
    if abs(p_vec[i]) == 0.0:
        raise ProjectiveError("isotropic direction is zero")
    w = np.cross(np.eye(3)[i], p_vec)
    return w / cmath.sqrt(bdot(w, w))


@dataclass(frozen=True, eq=False)
class FinChart:
    """Base point ``p`` on ``M`` at infinity with its isotropic direction and companion ``u``."""

    base: ProjectivePoint
    direction: np.ndarray
    companion: np.ndarray

    @classmethod
    def from_point(cls, p: ProjectivePoint, tol: float = DEFAULT_TOL) -> "FinChart":
        if classify_point(p, tol) != ON_M_INFINITY:
            raise ProjectiveError(f"{p.coords} is not a point of M at infinity")
        if _is_exceptional(p, tol):
            raise ProjectiveError("Fin_p is empty for the exceptional point (0:0:0:1:0)")
        a = p.scaled()
        # make p_vec exactly isotropic up to roundoff by reading it off the scaled point
        direction = a[:3]
        base = ProjectivePoint(tuple(a))
        return cls(base, direction, companion_direction(direction))

    @classmethod
    def from_direction(cls, p_vec, r_p) -> "FinChart":
        p_vec = np.asarray(p_vec, dtype=complex)
        return cls.from_point(ProjectivePoint((*p_vec, r_p, 0)))

    @property
    def r_p(self) -> complex:
        return self.base.coords[3]

    def plane_value(self, q) -> complex:
        """``q . p_vec - r_p / 2`` for an affine point ``q``."""
        return bdot(q, self.direction) - 0.5 * self.r_p


def fin_membership(chart: FinChart, Q: ProjectivePoint, tol: float = DEFAULT_TOL) -> bool:
    """Whether ``Q`` (a point of ``M``) lies in ``Fin_p`` for the chart's base point."""
    if classify_point(Q, tol) != ON_M_FINITE:
        return False
    q = Q.affine()
    scale = max(1.0, float(np.abs(q).max()))
    return abs(chart.plane_value(q)) <= tol * scale


def pseudo_distance_sq(Q1: ProjectivePoint, Q2: ProjectivePoint) -> complex:
    d = Q1.affine() - Q2.affine()
    return bdot(d, d)


def signed_length(chart: FinChart, Q1: ProjectivePoint, Q2: ProjectivePoint) -> complex:
    """``(q1 - q2) . u``; its square is the complex squared pseudo-distance."""
    return bdot(Q1.affine() - Q2.affine(), chart.companion)


def cycle_signs_from_fin(chart: FinChart, points, lengths, tol: float = 1e-9):
    """Signs ``eta`` with ``sum eta_j lambda_j = 0`` for a closed sequence on ``Fin_p``.

    ``lengths[j]`` belongs to the step from ``points[j]`` to ``points[j+1]``
    (indices mod k).  The signed lengths telescope to zero, and each
    ``lambda_j`` must be ``+-`` the corresponding signed length.

    Returns
    -------
    (eta, residual)
        ``eta`` a tuple of +-1 and ``residual = |sum eta_j lambda_j|``.
    """
    k = len(points)
    if len(lengths) != k:
        raise ValueError("need one length per step of the cycle")
    eta = []
    for j in range(k):
        ell = signed_length(chart, points[j], points[(j + 1) % k])
        lam = float(lengths[j])
        scale = max(1.0, lam)
        if lam <= 0:
            raise InconsistentLengthsError(f"length {j} is not positive")
        if abs(ell.imag) > tol * scale:
            raise NonRealSignedLengthError(f"signed length {j} = {ell} is not real")
        if abs(ell.real**2 - lam**2) > tol * scale**2:
            raise InconsistentLengthsError(f"length {j} = {lam} does not match signed length {ell.real}")
        eta.append(1 if ell.real >= 0 else -1)
    if eta and eta[0] < 0:
        eta = [-s for s in eta]
    residual = abs(sum(s * float(l) for s, l in zip(eta, lengths)))
    return tuple(eta), residual
