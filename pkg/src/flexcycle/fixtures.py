"""Built-in example polyhedra with realizations.

Each constructor returns ``(skeleton, realization)``.  The JSON copies in
``flexcycle/data`` are produced by :func:`write_fixture_files` and a test
checks they stay in sync.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .geometry import Realization
from .skeleton import Polyhedron2Skeleton, TriangularSkeleton

DATA_DIR = Path(__file__).parent / "data"

# Octahedron labelling: equator 0-1-2-3 (cyclic), apexes 4 and 5.
# Opposite (non-adjacent) pairs are {0, 2}, {1, 3}, {4, 5}.
OCTAHEDRON_FACES = (
    (4, 0, 1), (4, 1, 2), (4, 2, 3), (4, 3, 0),
    (5, 1, 0), (5, 2, 1), (5, 3, 2), (5, 0, 3),
)
EQUATOR_EDGES = ((0, 1), (1, 2), (2, 3), (0, 3))

# half-turn about the z-axis maps 0<->2, 1<->3, 4<->5
BRICARD_SEED = {
    0: (1.6, 0.35, 0.25),
    1: (0.3, 1.45, -0.4),
    4: (0.55, -0.35, 1.3),
}


def octahedron():
    """Regular octahedron with vertices (+-1, 0, 0), (0, +-1, 0), (0, 0, +-1)."""
    coords = {
        0: (1.0, 0.0, 0.0), 1: (0.0, 1.0, 0.0), 2: (-1.0, 0.0, 0.0), 3: (0.0, -1.0, 0.0),
        4: (0.0, 0.0, 1.0), 5: (0.0, 0.0, -1.0),
    }
    return TriangularSkeleton.from_faces(OCTAHEDRON_FACES), Realization(coords)


def half_turn(p):
    x, y, z = p
    return (-x, -y, z)


def bricard_type1(seed=None):
    """Line-symmetric (type 1) Bricard octahedron.

    Vertices 0, 1, 4 are free; 2, 3, 5 are their images under the half-turn
    about the z-axis.  Every edge orbit has two members of equal length, so
    the symmetric configuration space is one-dimensional.
    """
    seed = BRICARD_SEED if seed is None else seed
    coords = {0: seed[0], 1: seed[1], 4: seed[4]}
    coords[2] = half_turn(coords[0])
    coords[3] = half_turn(coords[1])
    coords[5] = half_turn(coords[4])
    return TriangularSkeleton.from_faces(OCTAHEDRON_FACES), Realization(coords)


def hinge(angle=math.pi / 2):
    """Two triangles sharing edge {0, 1}; ``angle`` is their dihedral angle."""
    coords = {
        0: (0.0, 0.0, 0.0),
        1: (1.0, 0.0, 0.0),
        2: (0.4, 1.0, 0.0),
        3: (0.6, math.cos(angle), math.sin(angle)),
    }
    return TriangularSkeleton.from_faces([(0, 1, 2), (0, 1, 3)]), Realization(coords)


def cube():
    """Unit cube with its six quadrilateral faces.  Vertex ``i`` has bits (x, y, z)."""
    coords = {i: (float(i & 1), float((i >> 1) & 1), float((i >> 2) & 1)) for i in range(8)}
    faces = [
        (0, 1, 3, 2), (4, 6, 7, 5),  # z = 0, z = 1
        (0, 4, 5, 1), (2, 3, 7, 6),  # y = 0, y = 1
        (0, 2, 6, 4), (1, 5, 7, 3),  # x = 0, x = 1
    ]
    return Polyhedron2Skeleton.from_faces(faces), Realization(coords)


def pentagonal_prism(height=1.0):
    """Right prism over a regular pentagon: two pentagons and five quads."""
    coords = {}
    for k in range(5):
        a = 2 * math.pi * k / 5
        coords[k] = (math.cos(a), math.sin(a), 0.0)
        coords[k + 5] = (math.cos(a), math.sin(a), height)
    faces = [(0, 1, 2, 3, 4), (9, 8, 7, 6, 5)]
    faces += [(k, k + 5, (k + 1) % 5 + 5, (k + 1) % 5) for k in range(5)]
    return Polyhedron2Skeleton.from_faces(faces), Realization(coords)


def quad_hinge(angle=2.0):
    """Two planar quadrilaterals sharing edge {0, 1}, free to rotate about it.

    Not closed (the six outer edges lie in one face each); used to exercise
    flips on fan diagonals of rigid quadrilateral faces along a genuine flex.
    """
    c, s = math.cos(angle), math.sin(angle)
    coords = {
        0: (0.0, 0.0, 0.0),
        1: (1.0, 0.0, 0.0),
        2: (1.2, 1.0, 0.0),
        3: (-0.1, 0.9, 0.0),
        4: (1.1, 0.8 * c, 0.8 * s),
        5: (0.15, 1.1 * c, 1.1 * s),
    }
    return Polyhedron2Skeleton.from_faces([(0, 1, 2, 3), (1, 0, 5, 4)]), Realization(coords)


FIXTURES = {
    "regular_octahedron": octahedron,
    "bricard_type1": bricard_type1,
    "hinge": hinge,
    "cube_quads": cube,
    "pentagonal_prism": pentagonal_prism,
    "quad_hinge": quad_hinge,
}


def fixture_document(name: str) -> dict:
    from .io import skeleton_document

    H, rho = FIXTURES[name]()
    return skeleton_document(H, rho)


def write_fixture_files(directory: Path = DATA_DIR) -> list:
    from .io import dumps_canonical

    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name in FIXTURES:
        path = directory / f"{name}.json"
        path.write_text(dumps_canonical(fixture_document(name)) + "\n")
        written.append(path)
    return written


def fixture_path(name: str) -> Path:
    return DATA_DIR / f"{name}.json"


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform random element of SO(3)."""
    Q, R = np.linalg.qr(rng.normal(size=(3, 3)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q
