"""Zero-sum cycle certificates for flexible polyhedra.

Trace flexes numerically, classify edges by whether their dihedral angle
changes, flip along constant-angle edges, and search for cycles whose edge
lengths admit a vanishing signed sum.
"""

__version__ = "0.1.0"

from .cycles import CycleCertificate, enumerate_cycles, find_zero_sum_cycle, sign_assignment, verify_certificate
from .flex import PinnedFrame, SampledFlex, classify_edges, constant_distance_pairs, flex_dimension, trace_flex
from .flips import augmented_graph, flip, flip_all, flip_sequence, verify_flip_properties
from .geometry import Realization, check_nondegenerate, dihedral_angle, edge_length_map, face_pair_profile
from .skeleton import Polyhedron2Skeleton, TriangularSkeleton, triangulate_fan, validate_skeleton

__all__ = [
    "CycleCertificate",
    "PinnedFrame",
    "Polyhedron2Skeleton",
    "Realization",
    "SampledFlex",
    "TriangularSkeleton",
    "augmented_graph",
    "check_nondegenerate",
    "classify_edges",
    "constant_distance_pairs",
    "dihedral_angle",
    "edge_length_map",
    "enumerate_cycles",
    "face_pair_profile",
    "find_zero_sum_cycle",
    "flex_dimension",
    "flip",
    "flip_all",
    "flip_sequence",
    "sign_assignment",
    "trace_flex",
    "triangulate_fan",
    "validate_skeleton",
    "verify_certificate",
    "verify_flip_properties",
]
