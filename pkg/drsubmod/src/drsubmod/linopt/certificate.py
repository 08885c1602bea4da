import logging
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..forest.instance import ForestInstance
from ..forest.rounding import ceil_bound, floor_bound
from ..hull.rows import cz_rows

logger = logging.getLogger(__name__)

Arc = Tuple[int, int]


@dataclass
class DualCertificate:
    """Multipliers of the box (p), monotonicity (q) and MIR (r) rows; all non-positive."""
    p: Dict[int, float] = field(default_factory=dict)
    q: Dict[Arc, float] = field(default_factory=dict)
    r: Dict[int, float] = field(default_factory=dict)

    def update(self, other: "DualCertificate") -> None:
        self.p.update(other.p)
        self.q.update(other.q)
        self.r.update(other.r)

    def objective(self, inst: ForestInstance) -> float:
        total = sum(inst.bound(i) * value for i, value in self.p.items())
        for psi, value in self.r.items():
            total += mir_rhs(inst, psi) * value
        return float(total)

    def to_dict(self) -> Dict:
        return {
            "p": {str(i): v for i, v in sorted(self.p.items())},
            "q": {f"{i},{j}": v for (i, j), v in sorted(self.q.items())},
            "r": {str(i): v for i, v in sorted(self.r.items())},
        }


def mir_rhs(inst: ForestInstance, psi: int) -> float:
    u = inst.bound(psi)
    low = floor_bound(u)
    return low * (ceil_bound(u) - u) / (u - low)


def dual_row_activity(inst: ForestInstance, cert: DualCertificate) -> np.ndarray:
    """Column sums A^T y of the CZ rows (without z >= 0) at the certificate."""
    activity = np.zeros(inst.n + 1)
    for i, value in cert.p.items():
        activity[i] += value
    for (i, j), value in cert.q.items():
        activity[i] += value
        activity[j] -= value
    for psi, value in cert.r.items():
        u = inst.bound(psi)
        activity[psi] += value / (u - floor_bound(u))
        activity[inst.psi_child(psi)] -= value
    return activity[1:]


class CertificateCheck(BaseModel):
    valid: bool = Field(description="All four checks pass within tolerance.")
    max_residual: float = Field(description="Largest residual over the four checks.")
    primal_objective: float
    dual_objective: float
    residuals: Dict[str, float] = Field(default_factory=dict, description="Residual per check.")


def verify_certificate(
    inst: ForestInstance, a: np.ndarray, z: np.ndarray, cert: DualCertificate, tol: float = 1e-8
) -> CertificateCheck:
    """Checks z in CZ, sign of the multipliers, dual feasibility and the duality gap."""
    a = np.asarray(a, dtype=float)
    z = np.asarray(z, dtype=float)

    primal_residual = 0.0
    for row in cz_rows(inst):
        primal_residual = max(primal_residual, -row.slack(z))

    values: List[float] = list(cert.p.values()) + list(cert.q.values()) + list(cert.r.values())
    sign_residual = max([0.0] + [v for v in values if v > 0])

    arcs = set(inst.arcs)
    unknown_arcs = [arc for arc in cert.q if arc not in arcs]
    unknown_psi = [psi for psi in cert.r if psi not in inst.psi]
    if unknown_arcs or unknown_psi:
        logger.warning(f"Certificate references unknown arcs {unknown_arcs} or rows {unknown_psi}")
        sign_residual = np.inf

    activity = dual_row_activity(inst, cert)
    dual_residual = float(max(0.0, np.max(activity - a))) if inst.n else 0.0

    primal_objective = float(a @ z)
    dual_objective = cert.objective(inst)
    gap = abs(primal_objective - dual_objective)

    residuals = {
        "primal": float(primal_residual),
        "sign": float(sign_residual),
        "dual": dual_residual,
        "gap": gap,
    }
    worst = max(residuals.values())
    threshold = tol * (1.0 + abs(primal_objective))
    return CertificateCheck(
        valid=worst <= threshold,
        max_residual=worst,
        primal_objective=primal_objective,
        dual_objective=dual_objective,
        residuals=residuals,
    )
