import logging
from enum import Enum
from typing import List, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..config.settings import settings
from ..forest.instance import ForestInstance
from ..forest.rounding import ceil_bound, floor_bound

logger = logging.getLogger(__name__)


class CutTag(str, Enum):
    BOX = "Box"
    NONNEG = "NonNeg"
    MONOTONE = "Monotone"
    MIR = "MIR"
    DR = "DR"


class LinearCut(BaseModel):
    """A row pi^T z <= rhs of the hull description."""
    coefficients: List[float] = Field(description="pi, one entry per vertex (vertex i at index i-1).")
    rhs: float = Field(description="Right-hand side pi_0.")
    tag: CutTag = Field(description="Family the row belongs to.")
    label: str = Field(default="", description="Short identifier such as 'z3<=u3' or 'mir(9,10)'.")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coefficients, dtype=float)

    def slack(self, z: np.ndarray) -> float:
        return float(self.rhs - self.as_array() @ np.asarray(z, dtype=float))

    def describe(self) -> str:
        terms = []
        for idx, coef in enumerate(self.coefficients, start=1):
            if coef != 0:
                terms.append(f"{coef:+.6g} z{idx}")
        lhs = " ".join(terms) if terms else "0"
        return f"[{self.tag.value}] {lhs} <= {self.rhs:.6g}"


def _unit_row(n: int, entries: List[Tuple[int, float]]) -> List[float]:
    row = [0.0] * n
    for vertex, value in entries:
        row[vertex - 1] += value
    return row


def mir_rows(inst: ForestInstance) -> List[LinearCut]:
    """
    -z_c + z_psi / (u_psi - floor(u_psi)) <= floor(u_psi)(ceil(u_psi) - u_psi) / (u_psi - floor(u_psi))
    for every psi in Psi and every integer child c (one row under Property 1).
    """
    rows = []
    for psi in sorted(inst.psi):
        u = inst.bound(psi)
        low, high = floor_bound(u), ceil_bound(u)
        frac = u - low
        rhs = low * (high - u) / frac
        for child in inst.children_of(psi):
            if not inst.is_integer(child):
                continue
            rows.append(LinearCut(
                coefficients=_unit_row(inst.n, [(child, -1.0), (psi, 1.0 / frac)]),
                rhs=rhs,
                tag=CutTag.MIR,
                label=f"mir({psi},{child})",
            ))
    return rows


def cz_rows(inst: ForestInstance, include_nonneg: bool = True) -> List[LinearCut]:
    """Box, monotonicity and MIR rows; together they describe conv(Z(G,u))."""
    rows = []
    for i in inst.vertices:
        rows.append(LinearCut(
            coefficients=_unit_row(inst.n, [(i, 1.0)]), rhs=inst.bound(i), tag=CutTag.BOX, label=f"z{i}<=u{i}",
        ))
    if include_nonneg:
        for i in inst.vertices:
            rows.append(LinearCut(
                coefficients=_unit_row(inst.n, [(i, -1.0)]), rhs=0.0, tag=CutTag.NONNEG, label=f"z{i}>=0",
            ))
    for i, j in inst.arcs:
        rows.append(LinearCut(
            coefficients=_unit_row(inst.n, [(i, 1.0), (j, -1.0)]), rhs=0.0, tag=CutTag.MONOTONE, label=f"z{i}<=z{j}",
        ))
    rows.extend(mir_rows(inst))
    return rows


def rows_as_matrix(rows: List[LinearCut]) -> Tuple[np.ndarray, np.ndarray]:
    if not rows:
        return np.zeros((0, 0)), np.zeros(0)
    A = np.array([r.coefficients for r in rows], dtype=float)
    b = np.array([r.rhs for r in rows], dtype=float)
    return A, b


def is_member_cz(inst: ForestInstance, z: np.ndarray, tol: float = None) -> Tuple[bool, List[LinearCut]]:
    """Row-wise check of z against the CZ description; returns the violated rows."""
    if tol is None:
        tol = settings.MEMBERSHIP_TOL
    z = np.asarray(z, dtype=float)
    violated = [row for row in cz_rows(inst) if row.slack(z) < -tol]
    return not violated, violated


def is_feasible(inst: ForestInstance, z: np.ndarray, tol: float = None) -> bool:
    """Membership in Z(G,u) itself: box, monotonicity and integrality."""
    return not inst.feasibility_violations(z, tol=tol)
