"""
Cutting-plane minimization of DR-submodular functions over Z(G,u) using
the hull rows plus DR cuts, with recovery of an exactly feasible minimizer.
"""

from .cutting_plane import (
    assumption2_offenders,
    default_iteration_cap,
    minimize,
    minimize_unconstrained_submodular,
)
from .models import SolverOptions, SolveReport, SolveStatus

__all__ = [
    "assumption2_offenders",
    "default_iteration_cap",
    "minimize",
    "minimize_unconstrained_submodular",
    "SolverOptions",
    "SolveReport",
    "SolveStatus",
]
