"""
Combinatorial linear optimization over conv(Z(G,u)): an optimal extreme
point P(S*) together with an explicit dual certificate (p, q, r).
"""

from .certificate import CertificateCheck, DualCertificate, dual_row_activity, mir_rhs, verify_certificate
from .tree_solver import (
    LinOptResult,
    SubtreeCase,
    SubtreeSolution,
    objective_for_extreme_point,
    s_values,
    solve_forest,
    solve_subtree_psi,
    solve_tree,
)

__all__ = [
    "CertificateCheck",
    "DualCertificate",
    "dual_row_activity",
    "mir_rhs",
    "verify_certificate",
    "LinOptResult",
    "SubtreeCase",
    "SubtreeSolution",
    "objective_for_extreme_point",
    "s_values",
    "solve_forest",
    "solve_subtree_psi",
    "solve_tree",
]
