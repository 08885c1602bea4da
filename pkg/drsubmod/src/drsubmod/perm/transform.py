import logging
from typing import Sequence

import numpy as np

from ..exceptions import InvalidPermutation, InvalidPrefix, NotAPsiRoot
from ..forest.instance import ForestInstance
from ..forest.rounding import floor_bound
from ..hull.extreme import require_hull_assumptions
from .permutations import PermutationLike, as_permutation
from .tracker import PrefixTracker

logger = logging.getLogger(__name__)


def _padded(z: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], np.asarray(z, dtype=float)])


def eta(inst: ForestInstance, psi: int, z: np.ndarray) -> float:
    """(z_psi - (u_psi - floor(u_psi)) z_ch) / (u_ch - u_psi)."""
    child = inst.psi_child(psi)
    if psi not in inst.psi or child is None:
        raise NotAPsiRoot(f"eta is defined for fractional-bounded vertices with a single child, got {psi}")
    u_psi, u_ch = inst.bound(psi), inst.bound(child)
    z = np.asarray(z, dtype=float)
    return float((z[psi - 1] - (u_psi - floor_bound(u_psi)) * z[child - 1]) / (u_ch - u_psi))


def _start(inst: ForestInstance) -> PrefixTracker:
    require_hull_assumptions(inst)
    return PrefixTracker(inst)


def t_value(inst: ForestInstance, prefix: Sequence[int], k: int, z: np.ndarray) -> float:
    """t_k for delta(k) = prefix[k-1], computed against the first k-1 entries."""
    if not 1 <= k <= len(prefix):
        raise InvalidPrefix(f"k={k} is outside the prefix of length {len(prefix)}")
    tracker = _start(inst)
    for position, v in enumerate(prefix[:k], start=1):
        if not 1 <= v <= inst.n or not tracker.is_candidate(v):
            raise InvalidPrefix(f"Vertex {v} is not a valid candidate after {tracker.order}", witness=tracker.order + [v])
        if position < k:
            tracker.place(v)
    return tracker.t_of(prefix[k - 1], _padded(z))


def t_vector(inst: ForestInstance, delta: PermutationLike, z: np.ndarray, strict: bool = True) -> np.ndarray:
    """
    (t_1, ..., t_n) of z along delta. With strict=True every step must be a
    valid candidate; otherwise only the denominators are checked.
    """
    perm = as_permutation(inst, delta)
    tracker = _start(inst)
    z_ext = _padded(z)
    values = np.zeros(inst.n)
    for k, v in enumerate(perm.order):
        if strict and not tracker.is_candidate(v):
            raise InvalidPrefix(f"Vertex {v} is not a valid candidate after {tracker.order}", witness=tracker.order + [v])
        values[k] = tracker.t_of(v, z_ext)
        tracker.place(v)
    return values


def t_matrix(inst: ForestInstance, delta: PermutationLike, strict: bool = True) -> np.ndarray:
    """T with T z = t_vector(delta, z); row k holds the linear form of t_k."""
    perm = as_permutation(inst, delta)
    tracker = _start(inst)
    T = np.zeros((inst.n, inst.n))
    for k, v in enumerate(perm.order):
        if strict and not tracker.is_candidate(v):
            raise InvalidPermutation(f"Vertex {v} is not a valid candidate after {tracker.order}", witness=tracker.order + [v])
        for vertex, coef in tracker.row_of(v).items():
            T[k, vertex - 1] += coef
        tracker.place(v)
    return T


def prefix_points(inst: ForestInstance, delta: PermutationLike) -> np.ndarray:
    """Row k is P(delta, k) = P({delta(1), ..., delta(k)}), k = 0..n."""
    perm = as_permutation(inst, delta)
    tracker = _start(inst)
    points = np.zeros((inst.n + 1, inst.n))
    for k, v in enumerate(perm.order, start=1):
        tracker.place(v)
        points[k] = tracker.point[1:]
    return points


def d_matrix(inst: ForestInstance, delta: PermutationLike, strict: bool = True) -> np.ndarray:
    """Column k is P(delta, k) - P(delta, k-1)."""
    perm = as_permutation(inst, delta)
    if strict:
        tracker = PrefixTracker(inst)
        for v in perm.order:
            if not tracker.is_candidate(v):
                raise InvalidPermutation(f"Vertex {v} is not a valid candidate after {tracker.order}")
            tracker.place(v)
    points = prefix_points(inst, perm)
    return np.diff(points, axis=0).T
