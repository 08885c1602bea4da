"""
Valid permutations of the vertex set, the t-function with its matrices T and
D, and the greedy convex decomposition of hull points.
"""

from .decomposition import Decomposition, decompose, permutation_finder
from .permutations import (
    Permutation,
    PermutationCheck,
    as_permutation,
    enumerate_valid_permutations,
    is_valid_permutation,
    valid_candidates,
)
from .tracker import PrefixTracker
from .transform import d_matrix, eta, prefix_points, t_matrix, t_value, t_vector

__all__ = [
    "Decomposition",
    "decompose",
    "permutation_finder",
    "Permutation",
    "PermutationCheck",
    "as_permutation",
    "enumerate_valid_permutations",
    "is_valid_permutation",
    "valid_candidates",
    "PrefixTracker",
    "d_matrix",
    "eta",
    "prefix_points",
    "t_matrix",
    "t_value",
    "t_vector",
]
