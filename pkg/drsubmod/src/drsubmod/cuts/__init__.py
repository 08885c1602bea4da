"""
DR inequalities for the epigraph of f over Z(G,u) and their exact
separation through the greedy permutation. Timing helpers live in
drsubmod.cuts.timing.
"""

from .dr_cut import (
    CutPool,
    CutValidation,
    DRCut,
    cut_violation,
    dr_cut,
    lower_envelope,
    separate,
    validate_cut_on_extremes,
)

__all__ = [
    "CutPool",
    "CutValidation",
    "DRCut",
    "cut_violation",
    "dr_cut",
    "lower_envelope",
    "separate",
    "validate_cut_on_extremes",
]
