import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from ..config.settings import settings
from ..exceptions import NumericalFailure

logger = logging.getLogger(__name__)


class LPStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


@dataclass
class DenseLP:
    """minimize c^T x subject to A x <= b and lower <= x <= upper (entries may be infinite)."""
    c: np.ndarray
    A: np.ndarray
    b: np.ndarray
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        n = self.c.shape[0]
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n)
        self.b = np.asarray(self.b, dtype=float).reshape(-1)
        if self.A.shape[0] != self.b.shape[0]:
            raise ValueError(f"A has {self.A.shape[0]} rows but b has {self.b.shape[0]} entries")
        self.lower = np.zeros(n) if self.lower is None else np.asarray(self.lower, dtype=float)
        self.upper = np.full(n, np.inf) if self.upper is None else np.asarray(self.upper, dtype=float)
        if not (np.all(np.isfinite(self.A)) and np.all(np.isfinite(self.b)) and np.all(np.isfinite(self.c))):
            raise ValueError("A, b and c must be finite")

    @property
    def shape(self) -> Tuple[int, int]:
        return self.A.shape


@dataclass
class LPResult:
    status: LPStatus
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    duals: Optional[np.ndarray] = None
    pivots: int = 0
    residuals: dict = field(default_factory=dict)


class _Basis:
    """Dense LU of the basis matrix, refactored after every pivot."""

    def __init__(self, matrix: np.ndarray, columns: List[int]):
        self.matrix = matrix
        self.columns = list(columns)
        self.factorize()

    def factorize(self) -> None:
        B = self.matrix[:, self.columns]
        if B.shape[0] == 0:
            self.lu = None
            return
        self.lu = lu_factor(B, check_finite=False)

    def solve(self, rhs: np.ndarray, transpose: bool = False) -> np.ndarray:
        if self.lu is None:
            return np.zeros(0)
        return lu_solve(self.lu, rhs, trans=1 if transpose else 0, check_finite=False)

    def replace(self, position: int, column: int) -> None:
        self.columns[position] = column
        self.factorize()


def _to_standard_form(lp: DenseLP):
    """
    x = offset + M y with y >= 0; returns the inequality system in y with
    finite upper bounds appended as extra rows.
    """
    n = lp.c.shape[0]
    columns, offset = [], np.zeros(n)
    extra_rows, extra_rhs = [], []
    for j in range(n):
        lo, hi = lp.lower[j], lp.upper[j]
        if np.isfinite(lo):
            offset[j] = lo
            col = np.zeros(n)
            col[j] = 1.0
            columns.append(col)
            if np.isfinite(hi):
                extra_rows.append(len(columns) - 1)
                extra_rhs.append(hi - lo)
        elif np.isfinite(hi):
            offset[j] = hi
            col = np.zeros(n)
            col[j] = -1.0
            columns.append(col)
        else:
            plus, minus = np.zeros(n), np.zeros(n)
            plus[j], minus[j] = 1.0, -1.0
            columns.extend([plus, minus])
    M = np.array(columns).T if columns else np.zeros((n, 0))
    ny = M.shape[1]
    A_y = lp.A @ M
    b_y = lp.b - lp.A @ offset
    if extra_rows:
        bound_rows = np.zeros((len(extra_rows), ny))
        for r, col in enumerate(extra_rows):
            bound_rows[r, col] = 1.0
        A_y = np.vstack([A_y, bound_rows])
        b_y = np.concatenate([b_y, extra_rhs])
    return M, offset, A_y, b_y


def _run_phase(
    matrix: np.ndarray,
    rhs: np.ndarray,
    cost: np.ndarray,
    basis: _Basis,
    blocked: np.ndarray,
    zero_level: np.ndarray,
    tol: float,
    pivots: int,
) -> Tuple[str, int]:
    """
    Revised simplex iterations with Dantzig pricing, switching to Bland's rule
    after settings.DEGENERATE_PIVOT_LIMIT consecutive degenerate pivots.
    Columns in `blocked` never enter; basic columns in `zero_level` must stay at 0.
    """
    degenerate_run = 0
    bland = False
    n_cols = matrix.shape[1]
    while True:
        if pivots >= settings.LP_MAX_PIVOTS:
            raise NumericalFailure(f"Simplex exceeded {settings.LP_MAX_PIVOTS} pivots")
        x_B = basis.solve(rhs)
        y = basis.solve(cost[basis.columns], transpose=True)
        reduced = cost - matrix.T @ y
        in_basis = np.zeros(n_cols, dtype=bool)
        in_basis[basis.columns] = True
        eligible = (~in_basis) & (~blocked) & (reduced < -tol)
        if not eligible.any():
            return "optimal", pivots
        if bland:
            entering = int(np.flatnonzero(eligible)[0])
        else:
            masked = np.where(eligible, reduced, np.inf)
            entering = int(np.argmin(masked))

        direction = basis.solve(matrix[:, entering])
        best_ratio, leaving = np.inf, -1
        for pos, col in enumerate(basis.columns):
            d = direction[pos]
            if zero_level[col] and abs(d) > tol:
                ratio = 0.0
            elif d > tol:
                ratio = max(x_B[pos], 0.0) / d
            else:
                continue
            if ratio < best_ratio - tol or (abs(ratio - best_ratio) <= tol and col < basis.columns[leaving]):
                best_ratio, leaving = ratio, pos
        if leaving < 0:
            return "unbounded", pivots

        if best_ratio <= tol:
            degenerate_run += 1
            if not bland and degenerate_run >= settings.DEGENERATE_PIVOT_LIMIT:
                logger.debug(f"Switching to Bland's rule after {degenerate_run} degenerate pivots")
                bland = True
        else:
            degenerate_run = 0
            bland = False
        basis.replace(leaving, entering)
        pivots += 1


def solve_lp(lp: DenseLP, tol: float = None) -> LPResult:
    """Two-phase dense revised simplex. Duals are returned for the rows of A (non-positive at optimum)."""
    if tol is None:
        tol = settings.LP_FEASIBILITY_TOL
    if np.any(lp.lower > lp.upper):
        return LPResult(status=LPStatus.INFEASIBLE)

    M, offset, A_y, b_y = _to_standard_form(lp)
    m, ny = A_y.shape
    flipped = b_y < 0
    sign = np.where(flipped, -1.0, 1.0)
    artificial_rows = np.flatnonzero(flipped)
    k = artificial_rows.size

    matrix = np.zeros((m, ny + m + k))
    matrix[:, :ny] = A_y * sign[:, None]
    matrix[:, ny:ny + m] = np.diag(sign)
    for idx, row in enumerate(artificial_rows):
        matrix[row, ny + m + idx] = 1.0
    rhs = b_y * sign

    n_cols = matrix.shape[1]
    is_artificial = np.zeros(n_cols, dtype=bool)
    is_artificial[ny + m:] = True
    start = [ny + i for i in range(m)]
    for idx, row in enumerate(artificial_rows):
        start[row] = ny + m + idx
    basis = _Basis(matrix, start)
    pivots = 0

    if k:
        phase_one = np.zeros(n_cols)
        phase_one[is_artificial] = 1.0
        _, pivots = _run_phase(matrix, rhs, phase_one, basis, np.zeros(n_cols, dtype=bool),
                               np.zeros(n_cols, dtype=bool), tol, pivots)
        infeasibility = float(phase_one[basis.columns] @ basis.solve(rhs))
        if infeasibility > tol * (1.0 + np.abs(rhs).max()):
            logger.debug(f"Phase one ended with infeasibility {infeasibility}")
            return LPResult(status=LPStatus.INFEASIBLE, pivots=pivots)

    cost = np.zeros(n_cols)
    cost[:ny] = M.T @ lp.c
    outcome, pivots = _run_phase(matrix, rhs, cost, basis, is_artificial, is_artificial, tol, pivots)
    if outcome == "unbounded":
        return LPResult(status=LPStatus.UNBOUNDED, pivots=pivots)

    values = np.zeros(n_cols)
    values[basis.columns] = np.maximum(basis.solve(rhs), 0.0)
    x = offset + M @ values[:ny]
    row_duals = basis.solve(cost[basis.columns], transpose=True) * sign
    duals = row_duals[: lp.A.shape[0]]
    objective = float(lp.c @ x)

    residuals = _residuals(lp, x, duals)
    scale = 1.0 + abs(objective) + float(np.abs(lp.b).max(initial=0.0))
    if residuals["primal"] > tol * scale or residuals["dual"] > 1e-8 * scale:
        raise NumericalFailure(f"Simplex residuals too large: {residuals}", witness=residuals)
    return LPResult(status=LPStatus.OPTIMAL, x=x, objective=objective, duals=duals, pivots=pivots, residuals=residuals)


def _residuals(lp: DenseLP, x: np.ndarray, duals: np.ndarray) -> dict:
    primal = float(max(0.0, np.max(lp.A @ x - lp.b, initial=0.0)))
    primal = max(primal, float(np.max(lp.lower - x, initial=0.0)), float(np.max(x - lp.upper, initial=0.0)))
    sign_violation = float(max(0.0, np.max(duals, initial=0.0)))
    slackness = float(np.max(np.abs(duals * (lp.b - lp.A @ x)), initial=0.0))
    return {"primal": primal, "dual": max(sign_violation, slackness)}
