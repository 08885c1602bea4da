"""
Dense two-phase revised simplex for the small LPs of this package, and the
LP over the CZ rows used as an independent check on the tree solver.
"""

from .cz import CZSolution, solve_over_cz
from .simplex import DenseLP, LPResult, LPStatus, solve_lp

__all__ = [
    "CZSolution",
    "solve_over_cz",
    "DenseLP",
    "LPResult",
    "LPStatus",
    "solve_lp",
]
