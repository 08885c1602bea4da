import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..config.settings import settings
from ..exceptions import DecompositionResidual, NotInHull
from ..forest.instance import ForestInstance
from ..hull.extreme import require_hull_assumptions
from ..hull.rows import is_member_cz
from .permutations import Permutation
from .tracker import PrefixTracker

logger = logging.getLogger(__name__)


@dataclass
class Decomposition:
    """z = sum_k weights[k] * points[k], k = 0..n, with weights[k] = t_k - t_{k+1}."""
    permutation: Permutation
    t: np.ndarray
    weights: np.ndarray
    points: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.weights @ self.points

    def support(self, tol: float = 0.0) -> list:
        return [k for k, w in enumerate(self.weights) if w > tol]

    def to_dict(self) -> dict:
        return {
            "permutation": list(self.permutation.order),
            "t": self.t.tolist(),
            "weights": self.weights.tolist(),
            "points": self.points.tolist(),
        }


def _greedy(inst: ForestInstance, z: np.ndarray) -> Tuple[Permutation, np.ndarray, np.ndarray]:
    """Greedy valid permutation for z, with its t-values and prefix points."""
    tie = settings.TIE_TOL
    tracker = PrefixTracker(inst)
    z_ext = np.concatenate([[0.0], z])
    remaining = list(inst.vertices)
    t = np.zeros(inst.n)
    points = np.zeros((inst.n + 1, inst.n))
    for k in range(inst.n):
        best, best_t = 0, -np.inf
        for v in remaining:
            if not tracker.is_candidate(v):
                continue
            value = tracker.t_of(v, z_ext)
            if value > best_t + tie:
                best, best_t = v, value
        tracker.place(best)
        remaining.remove(best)
        t[k] = best_t
        points[k + 1] = tracker.point[1:]
    return Permutation(tracker.order), t, points


def _check_in_hull(inst: ForestInstance, z: np.ndarray) -> None:
    member, violated = is_member_cz(inst, z)
    if not member:
        raise NotInHull(
            f"Point violates {len(violated)} hull rows, first: {violated[0].label}",
            witness=[row.label for row in violated],
        )


def permutation_finder(inst: ForestInstance, z: np.ndarray, check_membership: bool = True) -> Permutation:
    """
    Builds a valid permutation greedily: at every step append the candidate
    with the largest t-value (smallest id on ties).
    """
    require_hull_assumptions(inst)
    z = np.asarray(z, dtype=float)
    if check_membership:
        _check_in_hull(inst, z)
    perm, _, _ = _greedy(inst, z)
    return perm


def decompose(inst: ForestInstance, z: np.ndarray, check_membership: bool = True) -> Decomposition:
    """Convex combination of the prefix points of the greedy permutation equal to z."""
    require_hull_assumptions(inst)
    tol = settings.DECOMPOSITION_TOL
    z = np.asarray(z, dtype=float)
    if check_membership:
        _check_in_hull(inst, z)
    perm, t, points = _greedy(inst, z)

    extended = np.concatenate([[1.0], t, [0.0]])
    weights = extended[:-1] - extended[1:]
    if weights.min() < -tol:
        raise DecompositionResidual(
            f"Negative weight {weights.min()} at prefix {int(weights.argmin())}",
            witness=weights.tolist(),
        )
    if weights.min() < 0:
        logger.debug(f"Clamping weights down to {weights.min()} to zero")
    weights = np.maximum(weights, 0.0)
    total = weights.sum()
    if abs(total - 1.0) > tol:
        raise DecompositionResidual(f"Weights sum to {total}", witness=weights.tolist())

    residual = float(np.max(np.abs(weights @ points - z))) if inst.n else 0.0
    if residual > tol * max(1.0, float(np.max(np.abs(z), initial=0.0))):
        raise DecompositionResidual(f"Reconstruction residual {residual}", witness=residual)
    return Decomposition(permutation=perm, t=t, weights=weights, points=points)
