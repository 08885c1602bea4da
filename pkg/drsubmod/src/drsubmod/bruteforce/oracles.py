import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..cuts.dr_cut import cut_violation, dr_cut
from ..exceptions import BudgetExceeded, InstanceError
from ..forest.instance import ForestInstance
from ..forest.normalize import map_solution_back, normalize_property1
from ..forest.oracle import ValueOracle
from ..forest.rounding import round_down_to_integer
from ..hull.extreme import VertexSubset, extreme_point, subset_from_mask
from ..perm.permutations import Permutation, enumerate_valid_permutations, is_valid_permutation

logger = logging.getLogger(__name__)


class EnumerationBudget(BaseModel):
    max_subsets: int = Field(default=2 ** 20, gt=0, description="Largest 2^|V| accepted.")
    max_permutations: int = Field(default=10 ** 6, gt=0, description="Largest number of permutations visited.")
    max_lattice_points: int = Field(default=10 ** 7, gt=0, description="Largest grid size accepted.")


@dataclass
class ExtremeMinimum:
    """Best P(S); subset is in the ids of the normalized instance, point in the caller's coordinates."""
    subset: VertexSubset
    value: float
    point: np.ndarray


def min_over_extreme_points(
    inst: ForestInstance, oracle: ValueOracle, budget: Optional[EnumerationBudget] = None
) -> ExtremeMinimum:
    budget = budget or EnumerationBudget()
    work, work_oracle, vertex_map = normalize_property1(inst, oracle)
    if 2 ** work.n > budget.max_subsets:
        raise BudgetExceeded(f"2^{work.n} subsets exceed the budget of {budget.max_subsets}")

    best: Optional[ExtremeMinimum] = None
    for mask in range(1 << work.n):
        S = subset_from_mask(mask, work.n)
        point = extreme_point(work, S)
        value = work_oracle.evaluate(point)
        if best is None or value < best.value:
            best = ExtremeMinimum(subset=S, value=value, point=point)
    best.point = map_solution_back(best.point, vertex_map)
    logger.debug(f"Minimum over {2 ** work.n} extreme points: {best.value} at S={sorted(best.subset)}")
    return best


def _axis(inst: ForestInstance, i: int, grid_step: float) -> np.ndarray:
    u = inst.bound(i)
    if not np.isfinite(u):
        raise InstanceError(f"Lattice enumeration needs finite bounds; u_{i} is infinite")
    if inst.is_integer(i):
        return np.arange(0, round_down_to_integer(u) + 1, dtype=float)
    count = int(math.floor(u / grid_step + 1e-9))
    values = np.arange(count + 1, dtype=float) * grid_step
    if u - values[-1] > 1e-12:
        values = np.append(values, u)
    return values


def min_over_lattice(
    inst: ForestInstance,
    oracle: ValueOracle,
    grid_step: float = 0.5,
    budget: Optional[EnumerationBudget] = None,
) -> Tuple[np.ndarray, float]:
    """
    Minimum of f over the feasible points of a grid: integer coordinates take
    every integer in [0, u_i], continuous ones the multiples of grid_step plus u_i.
    """
    if grid_step <= 0:
        raise ValueError(f"grid_step must be positive, got {grid_step}")
    budget = budget or EnumerationBudget()
    axes = {i: _axis(inst, i, grid_step) for i in inst.vertices}
    size = math.prod(len(axis) for axis in axes.values())
    if size > budget.max_lattice_points:
        raise BudgetExceeded(f"Grid of {size} points exceeds the budget of {budget.max_lattice_points}")

    point = np.zeros(inst.n)
    best_value, best_point = np.inf, None

    def descend(position: int):
        nonlocal best_value, best_point
        if position == inst.n:
            value = oracle.evaluate(point)
            if value < best_value:
                best_value, best_point = value, point.copy()
            return
        v = inst.order[position]
        floor = point[inst.parent[v] - 1] if inst.parent[v] else 0.0
        for value in axes[v]:
            if value < floor - 1e-12:
                continue
            point[v - 1] = value
            descend(position + 1)
        point[v - 1] = 0.0

    descend(0)
    return best_point, float(best_value)


def _counted(iterator: Iterator[Permutation], budget: EnumerationBudget) -> Iterator[Permutation]:
    for count, perm in enumerate(iterator, start=1):
        if count > budget.max_permutations:
            raise BudgetExceeded(f"More than {budget.max_permutations} permutations visited")
        yield perm


def max_violation_over_permutations(
    inst: ForestInstance,
    oracle: ValueOracle,
    z: np.ndarray,
    w: float,
    budget: Optional[EnumerationBudget] = None,
) -> Tuple[Permutation, float]:
    """Largest pi^T z - w over the DR cuts of every valid permutation."""
    budget = budget or EnumerationBudget()
    best_perm, best = None, -np.inf
    for perm in _counted(enumerate_valid_permutations(inst, limit=inst.n), budget):
        violation = cut_violation(dr_cut(inst, oracle, perm, check_valid=False), z, w)
        if violation > best:
            best_perm, best = perm, violation
    return best_perm, float(best)


def brute_force_valid_permutations(inst: ForestInstance, budget: Optional[EnumerationBudget] = None) -> List[Permutation]:
    """All |V|! orders filtered through is_valid_permutation."""
    budget = budget or EnumerationBudget()
    if math.factorial(inst.n) > budget.max_permutations:
        raise BudgetExceeded(f"{inst.n}! permutations exceed the budget of {budget.max_permutations}")
    return [
        Permutation(order)
        for order in itertools.permutations(inst.vertices)
        if is_valid_permutation(inst, order).valid
    ]
