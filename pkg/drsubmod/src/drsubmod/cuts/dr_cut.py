import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field

from ..config.settings import settings
from ..exceptions import InvalidPermutation, TooLarge
from ..forest.instance import ForestInstance
from ..forest.oracle import ValueOracle
from ..hull.extreme import enumerate_extreme_points, require_hull_assumptions
from ..perm.decomposition import decompose, permutation_finder
from ..perm.permutations import PermutationLike, as_permutation, is_valid_permutation
from ..perm.tracker import PrefixTracker

logger = logging.getLogger(__name__)


class DRCut(BaseModel):
    """Epigraph inequality w >= pi^T z generated by a permutation."""
    permutation: List[int] = Field(description="Generating permutation delta.")
    coefficients: List[float] = Field(description="pi = d^T T, vertex i at index i-1.")
    prefix_values: List[float] = Field(description="f(P(delta, k)) for k = 0..n.")

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coefficients, dtype=float)

    def value(self, z: np.ndarray) -> float:
        return float(self.as_array() @ np.asarray(z, dtype=float))

    def describe(self) -> str:
        terms = [f"{c:+.10g} z{i}" for i, c in enumerate(self.coefficients, start=1) if c != 0]
        return "w >= " + (" ".join(terms) if terms else "0")


class CutValidation(BaseModel):
    valid: bool
    worst_slack: float = Field(description="min over S of f(P(S)) - pi^T P(S).")
    worst_subset: List[int] = Field(default_factory=list)


def _build_cut(inst: ForestInstance, oracle: ValueOracle, order: List[int]) -> DRCut:
    tracker = PrefixTracker(inst)
    pi = np.zeros(inst.n)
    previous = oracle.evaluate(np.zeros(inst.n))
    values = [previous]
    for v in order:
        row = tracker.row_of(v)
        tracker.place(v)
        current = oracle.evaluate(tracker.point[1:])
        step = current - previous
        for vertex, coef in row.items():
            pi[vertex - 1] += step * coef
        values.append(current)
        previous = current
    return DRCut(permutation=list(order), coefficients=pi.tolist(), prefix_values=values)


def dr_cut(inst: ForestInstance, oracle: ValueOracle, delta: PermutationLike, check_valid: bool = True) -> DRCut:
    """pi = d^T T with d_k = f(P(delta,k)) - f(P(delta,k-1)); n + 1 oracle calls."""
    require_hull_assumptions(inst)
    perm = as_permutation(inst, delta)
    if check_valid:
        check = is_valid_permutation(inst, perm)
        if not check.valid:
            raise InvalidPermutation(
                f"Permutation violates conditions {check.violated_conditions}", witness=check.witnesses
            )
    return _build_cut(inst, oracle, list(perm.order))


def cut_violation(cut: DRCut, z: np.ndarray, w: float) -> float:
    """pi^T z - w; positive means (z, w) is cut off."""
    return cut.value(z) - float(w)


def separate(
    inst: ForestInstance, oracle: ValueOracle, z: np.ndarray, w: float, check_membership: bool = True
) -> DRCut:
    """Most violated DR inequality at (z, w): the cut of the greedy permutation for z."""
    perm = permutation_finder(inst, z, check_membership=check_membership)
    cut = _build_cut(inst, oracle, list(perm.order))
    logger.debug(f"Separated cut with violation {cut_violation(cut, z, w)} from {list(perm.order)}")
    return cut


def lower_envelope(inst: ForestInstance, oracle: ValueOracle, z: np.ndarray) -> float:
    """Convex envelope of f over the hull at z: sum_k lambda_k f(P(delta,k))."""
    decomposition = decompose(inst, z)
    return float(sum(
        weight * oracle.evaluate(point)
        for weight, point in zip(decomposition.weights, decomposition.points)
        if weight > 0
    ))


def validate_cut_on_extremes(
    inst: ForestInstance, oracle: ValueOracle, cut: DRCut, limit: int = None, tol: float = 1e-9
) -> CutValidation:
    """Checks f(P(S)) >= pi^T P(S) for every subset S."""
    if limit is None:
        limit = settings.MAX_HULL_ENUMERATION
    if inst.n > limit:
        raise TooLarge(f"Validating over 2^{inst.n} extreme points exceeds the limit of 2^{limit}")
    pi = cut.as_array()
    worst, worst_subset = np.inf, []
    for S, point in enumerate_extreme_points(inst, canonical=True, limit=limit):
        value = oracle.evaluate(point)
        slack = value - float(pi @ point)
        if slack < worst:
            worst, worst_subset = slack, sorted(S)
    scale = 1.0 + max(abs(v) for v in cut.prefix_values)
    return CutValidation(valid=worst >= -tol * scale, worst_slack=float(worst), worst_subset=worst_subset)


class CutPool:
    """DR cuts collected by the master loop; near-identical coefficient vectors are merged."""

    def __init__(self, dimension: int, merge_tol: float = None):
        self.dimension = dimension
        self.merge_tol = settings.CUT_MERGE_TOL if merge_tol is None else merge_tol
        self.cuts: List[DRCut] = []
        self._rows: List[np.ndarray] = []
        self.merged = 0

    def __len__(self) -> int:
        return len(self.cuts)

    def add(self, cut: DRCut) -> bool:
        row = cut.as_array()
        for existing in self._rows:
            if np.max(np.abs(existing - row), initial=0.0) <= self.merge_tol:
                self.merged += 1
                return False
        self.cuts.append(cut)
        self._rows.append(row)
        return True

    def matrix(self) -> np.ndarray:
        if not self._rows:
            return np.zeros((0, self.dimension))
        return np.vstack(self._rows)

    def find(self, cut: DRCut) -> Optional[int]:
        row = cut.as_array()
        for idx, existing in enumerate(self._rows):
            if np.max(np.abs(existing - row), initial=0.0) <= self.merge_tol:
                return idx
        return None
