"""
Extreme points P(S) of conv(Z(G,u)) and its linear description CZ
(box, monotonicity and mixed-integer rounding rows).
"""

from .extreme import (
    VertexSubset,
    anchors,
    enumerate_extreme_points,
    extreme_point,
    i_triangle,
    mask_of,
    point_key,
    require_hull_assumptions,
    sigma,
    subset_from_mask,
)
from .rows import CutTag, LinearCut, cz_rows, is_feasible, is_member_cz, mir_rows, rows_as_matrix

__all__ = [
    "VertexSubset",
    "anchors",
    "enumerate_extreme_points",
    "extreme_point",
    "i_triangle",
    "mask_of",
    "point_key",
    "require_hull_assumptions",
    "sigma",
    "subset_from_mask",
    "CutTag",
    "LinearCut",
    "cz_rows",
    "is_feasible",
    "is_member_cz",
    "mir_rows",
    "rows_as_matrix",
]
