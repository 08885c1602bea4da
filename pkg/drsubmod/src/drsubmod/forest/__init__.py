"""
Instance model for the mixed-integer feasible set Z(G,u): a directed rooted
forest with bounds and integrality marks, its validation, the assumption
checks, and the normalizations (rounding, finite bounds, vertex insertion).
"""

from .instance import (
    AssumptionCheck,
    ForestInstance,
    InstanceClass,
    build_instance,
    check_assumption1,
    check_assumption2,
    check_point_feasible,
    classify_instance,
    finitize_bounds,
    psi_set,
    reach_sets,
    relax_fractional_bounds,
)
from .normalize import VertexMap, lift_solution, map_solution_back, normalize_property1
from .oracle import (
    DRCheckResult,
    LiftedOracle,
    QuadraticSpec,
    TableObjective,
    ValueOracle,
    check_dr_submodularity,
)
from .rounding import ceil_bound, floor_bound, is_integral

__all__ = [
    "AssumptionCheck",
    "ForestInstance",
    "InstanceClass",
    "build_instance",
    "check_assumption1",
    "check_assumption2",
    "check_point_feasible",
    "classify_instance",
    "finitize_bounds",
    "psi_set",
    "reach_sets",
    "relax_fractional_bounds",
    "VertexMap",
    "lift_solution",
    "map_solution_back",
    "normalize_property1",
    "DRCheckResult",
    "LiftedOracle",
    "QuadraticSpec",
    "TableObjective",
    "ValueOracle",
    "check_dr_submodularity",
    "ceil_bound",
    "floor_bound",
    "is_integral",
]
