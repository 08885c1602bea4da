"""
Exhaustive reference oracles (extreme points, grid points, valid
permutations) and the seeded random generators used to cross-check the
fast algorithms on small instances.
"""

from .generators import random_hull_point, random_instance, random_linear_objective, random_quadratic
from .oracles import (
    EnumerationBudget,
    ExtremeMinimum,
    brute_force_valid_permutations,
    max_violation_over_permutations,
    min_over_extreme_points,
    min_over_lattice,
)

__all__ = [
    "random_hull_point",
    "random_instance",
    "random_linear_objective",
    "random_quadratic",
    "EnumerationBudget",
    "ExtremeMinimum",
    "brute_force_valid_permutations",
    "max_violation_over_permutations",
    "min_over_extreme_points",
    "min_over_lattice",
]
