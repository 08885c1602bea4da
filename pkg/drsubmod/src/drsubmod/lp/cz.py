import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..forest.instance import ForestInstance
from ..hull.rows import CutTag, LinearCut, cz_rows, rows_as_matrix
from ..linopt.certificate import DualCertificate
from .simplex import DenseLP, LPResult, LPStatus, solve_lp

logger = logging.getLogger(__name__)


@dataclass
class CZSolution:
    status: LPStatus
    z: Optional[np.ndarray]
    objective: Optional[float]
    duals: Optional[np.ndarray]
    rows: List[LinearCut] = field(default_factory=list)

    def certificate(self) -> Optional[DualCertificate]:
        """Row multipliers regrouped as (p, q, r); None if a psi carries more than one MIR row."""
        if self.duals is None:
            return None
        cert = DualCertificate()
        for row, value in zip(self.rows, self.duals):
            coef = row.coefficients
            if row.tag == CutTag.BOX:
                cert.p[int(np.flatnonzero(coef)[0]) + 1] = float(value)
            elif row.tag == CutTag.MONOTONE:
                i = int(np.flatnonzero(np.asarray(coef) > 0)[0]) + 1
                j = int(np.flatnonzero(np.asarray(coef) < 0)[0]) + 1
                cert.q[(i, j)] = float(value)
            elif row.tag == CutTag.MIR:
                psi = int(np.flatnonzero(np.asarray(coef) > 0)[0]) + 1
                if psi in cert.r:
                    return None
                cert.r[psi] = float(value)
        return cert


def solve_over_cz(inst: ForestInstance, a: np.ndarray) -> CZSolution:
    """min a^T z over the box, monotonicity and MIR rows with z >= 0, by the dense simplex."""
    a = np.asarray(a, dtype=float)
    if a.shape != (inst.n,):
        raise ValueError(f"Objective has shape {a.shape}, expected ({inst.n},)")
    rows = [row for row in cz_rows(inst, include_nonneg=False) if np.isfinite(row.rhs)]
    A, b = rows_as_matrix(rows)
    if not rows:
        A = np.zeros((0, inst.n))
    result: LPResult = solve_lp(DenseLP(c=a, A=A, b=b))
    logger.debug(f"CZ LP over {len(rows)} rows: {result.status.value} after {result.pivots} pivots")
    return CZSolution(status=result.status, z=result.x, objective=result.objective, duals=result.duals, rows=rows)
