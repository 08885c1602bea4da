import logging
import time
from typing import Callable, FrozenSet, List, Optional, Tuple

import numpy as np

from ..bruteforce.oracles import EnumerationBudget, min_over_extreme_points
from ..config.settings import settings
from ..cuts.dr_cut import CutPool, DRCut, cut_violation, separate
from ..exceptions import (
    Assumption1Violated,
    Assumption2Violated,
    BudgetExceeded,
    IterationLimit,
    NonDRSubmodularDetected,
    NumericalFailure,
)
from ..forest.instance import (
    ForestInstance,
    build_instance,
    check_assumption1,
    check_assumption2,
    finitize_bounds,
    relax_fractional_bounds,
)
from ..forest.normalize import map_solution_back, normalize_property1
from ..forest.oracle import ValueOracle, check_dr_submodularity
from ..forest.rounding import ceil_bound
from ..hull.rows import cz_rows, rows_as_matrix
from ..lp.simplex import DenseLP, LPStatus, solve_lp
from ..perm.decomposition import decompose
from .models import SolverOptions, SolveReport, SolveStatus

logger = logging.getLogger(__name__)


def assumption2_offenders(inst: ForestInstance) -> List[int]:
    """Psi members with u > 1 having a descendant whose bound differs from ceil(u_psi)."""
    offenders = []
    for psi in sorted(inst.psi):
        u = inst.bound(psi)
        if u <= 1:
            continue
        target = ceil_bound(u)
        if any(inst.bound(i) != target for i in inst.descendants[psi] - {psi}):
            offenders.append(psi)
    return offenders


def default_iteration_cap(n: int) -> int:
    return 10 * 2 ** min(n, 12)


class _Master:
    """min w over the CZ rows and the pool rows pi^T z - w <= 0; variables (z, w) with w free."""

    def __init__(self, inst: ForestInstance):
        self.n = inst.n
        rows = [row for row in cz_rows(inst, include_nonneg=False) if np.isfinite(row.rhs)]
        A, b = rows_as_matrix(rows)
        self.base_A = np.hstack([A, np.zeros((A.shape[0], 1))]) if rows else np.zeros((0, self.n + 1))
        self.base_b = b if rows else np.zeros(0)
        self.lower = np.concatenate([np.zeros(self.n), [-np.inf]])
        self.upper = np.full(self.n + 1, np.inf)
        self.c = np.zeros(self.n + 1)
        self.c[-1] = 1.0

    def solve(self, pool: CutPool) -> Tuple[np.ndarray, float]:
        cuts = pool.matrix()
        cut_rows = np.hstack([cuts, -np.ones((cuts.shape[0], 1))])
        A = np.vstack([self.base_A, cut_rows])
        b = np.concatenate([self.base_b, np.zeros(cuts.shape[0])])
        result = solve_lp(DenseLP(c=self.c, A=A, b=b, lower=self.lower, upper=self.upper))
        if result.status != LPStatus.OPTIMAL:
            raise NumericalFailure(f"Master LP ended {result.status.value} with {len(pool)} cuts")
        return result.x[: self.n], float(result.x[-1])


def _prepare(inst: ForestInstance, oracle: ValueOracle, options: SolverOptions, report_flags: List[str]):
    check = check_assumption1(inst)
    if not check.holds:
        raise Assumption1Violated(check.message, witness=check.witness)

    work = inst
    relaxed: List[int] = []
    if not check_assumption2(inst).holds:
        offenders = assumption2_offenders(inst)
        if not options.allow_degraded:
            check = check_assumption2(inst)
            raise Assumption2Violated(check.message, witness=check.witness)
        logger.warning(f"Assumption 2 fails at {offenders}; solving the relaxation with rounded-up bounds")
        work = relax_fractional_bounds(inst, offenders)
        relaxed = offenders

    if options.check_dr:
        dr = check_dr_submodularity(oracle, work, seed=options.seed)
        if not dr.passed:
            raise NonDRSubmodularDetected(
                f"Oracle is not DR-submodular ({dr.method}): worst violation {dr.worst_violation}",
                witness=dr.witness,
            )

    if work.has_infinite_bounds():
        work = finitize_bounds(work)
    report_flags.extend(work.flags)
    return work, relaxed


def minimize(inst: ForestInstance, oracle: ValueOracle, options: Optional[SolverOptions] = None) -> SolveReport:
    """
    Cutting-plane minimization of f over Z(G,u): the master LP over the hull
    rows and the pool of DR cuts is re-solved until the greedy separation at
    the master point finds no cut violated by more than epsilon. The answer
    is the best prefix point of the decomposition of the last master point.
    """
    options = options or SolverOptions()
    started = time.perf_counter()
    flags: List[str] = []
    work, relaxed = _prepare(inst, oracle, options, flags)

    ext, ext_oracle, vertex_map = normalize_property1(work, oracle)
    memo = ValueOracle(ext_oracle.evaluate, ext.n, name=f"memo({oracle.name})", memoize=True)
    cap = options.max_iterations or default_iteration_cap(ext.n)
    logger.info(f"Minimizing {oracle.name} over {ext!r} (epsilon={options.epsilon}, cap={cap})")

    pool = CutPool(ext.n)
    seed = np.zeros(ext.n) if options.seed_point == "zero" else ext.upper_bounds
    pool.add(separate(ext, memo, seed, 0.0))
    master = _Master(ext)

    history: List[float] = []
    last_cut: Optional[DRCut] = None
    violation = np.inf
    z_bar, w_bar = None, None
    for iteration in range(1, cap + 1):
        z_bar, w_bar = master.solve(pool)
        history.append(w_bar)
        last_cut = separate(ext, memo, z_bar, w_bar, check_membership=False)
        violation = cut_violation(last_cut, z_bar, w_bar)
        logger.debug(f"Iteration {iteration}: master bound {w_bar}, violation {violation}")
        if violation <= options.epsilon:
            break
        if not pool.add(last_cut):
            raise NumericalFailure(
                f"Separated cut is already in the pool but violated by {violation}",
                witness=last_cut.permutation,
            )
    else:
        raise IterationLimit(f"No convergence after {cap} master solves (violation {violation})", witness=history)

    decomposition = decompose(ext, z_bar, check_membership=False)
    best_k, best_value = None, np.inf
    for k in decomposition.support():
        value = memo.evaluate(decomposition.points[k])
        if value < best_value:
            best_k, best_value = k, value
    recovery_gap = best_value > w_bar + options.epsilon * (1.0 + abs(w_bar))
    if recovery_gap:
        logger.warning(f"Recovered value {best_value} exceeds the master bound {w_bar} by more than epsilon")
        flags.append("recovery-gap")

    point = map_solution_back(decomposition.points[best_k], vertex_map)
    offset = oracle.base_value
    report = SolveReport(
        status=SolveStatus.DEGRADED if relaxed or recovery_gap else SolveStatus.OPTIMAL,
        point=point.tolist(),
        value=float(best_value) + offset,
        master_bound=float(w_bar) + offset,
        iterations=len(history),
        cuts_generated=len(pool),
        cuts_merged=pool.merged,
        final_violation=float(violation),
        recovery_index=int(best_k),
        recovery_permutation=list(decomposition.permutation.order),
        bound_history=[w + offset for w in history],
        oracle_evaluations=memo.evaluations,
        oracle_cache_hits=memo.cache_hits,
        inserted_vertices={str(rho): psi for rho, psi in vertex_map.inserted.items()},
        relaxed_vertices=relaxed,
        flags=flags,
        wall_time=0.0,
    )
    if relaxed:
        original = finitize_bounds(inst) if inst.has_infinite_bounds() else inst
        _certify_degraded(original, oracle, options, report)
    report.wall_time = time.perf_counter() - started
    logger.info(
        f"{report.status.value}: value {report.value} after {report.iterations} iterations "
        f"and {report.cuts_generated} cuts"
    )
    return report


def _certify_degraded(inst: ForestInstance, oracle: ValueOracle, options: SolverOptions, report: SolveReport) -> None:
    """
    The relaxed optimum is a lower bound; the exact value comes from enumerating
    the extreme points of the finitized, unrelaxed instance when that fits.
    """
    report.flags.append("bound-only")
    if inst.feasibility_violations(np.asarray(report.point)):
        report.flags.append("point-infeasible-for-original")
    if not options.certify_degraded_by_bruteforce:
        return
    try:
        budget = EnumerationBudget(max_subsets=2 ** settings.MAX_HULL_ENUMERATION)
        best = min_over_extreme_points(inst, oracle, budget)
    except BudgetExceeded as e:
        logger.warning(f"Degraded result left uncertified: {e}")
        return
    report.bruteforce_value = float(best.value) + oracle.base_value
    report.bruteforce_point = best.point.tolist()
    report.point = best.point.tolist()
    report.value = report.bruteforce_value
    report.flags.append("certified-by-enumeration")


def minimize_unconstrained_submodular(
    set_function: Callable[[FrozenSet[int]], float], n: int, options: Optional[SolverOptions] = None
) -> Tuple[FrozenSet[int], float]:
    """Minimizes a set function on subsets of {1..n} through the all-binary instance."""
    inst = build_instance(n, [], [1.0] * n, range(1, n + 1))

    def on_points(z: np.ndarray) -> float:
        return set_function(frozenset(i + 1 for i in range(n) if z[i] > 0.5))

    report = minimize(inst, ValueOracle(on_points, n, name="set-function"), options)
    chosen = frozenset(i + 1 for i, value in enumerate(report.point) if value > 0.5)
    return chosen, report.value
