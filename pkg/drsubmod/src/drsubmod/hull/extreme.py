import logging
from typing import FrozenSet, Iterable, Iterator, Tuple

import numpy as np

from ..config.settings import settings
from ..exceptions import AssumptionViolated, TooLarge
from ..forest.instance import ForestInstance
from ..forest.rounding import floor_bound

logger = logging.getLogger(__name__)

VertexSubset = FrozenSet[int]


def as_subset(inst: ForestInstance, S: Iterable[int]) -> VertexSubset:
    subset = frozenset(int(v) for v in S)
    bad = [v for v in subset if not 1 <= v <= inst.n]
    if bad:
        raise ValueError(f"Vertices {sorted(bad)} are not in 1..{inst.n}")
    return subset


def subset_from_mask(mask: int, n: int) -> VertexSubset:
    return frozenset(i + 1 for i in range(n) if mask >> i & 1)


def mask_of(S: Iterable[int]) -> int:
    mask = 0
    for v in S:
        mask |= 1 << (v - 1)
    return mask


def require_hull_assumptions(inst: ForestInstance) -> None:
    check = inst.hull_ready
    if not check.holds:
        raise AssumptionViolated(check.message, witness=check.witness)


def i_triangle(inst: ForestInstance, S: Iterable[int], i: int) -> int:
    """Deepest member of S on the path root -> i, or the sentinel 0."""
    subset = S if isinstance(S, frozenset) else frozenset(S)
    for v in reversed(inst.ascendants[i]):
        if v in subset:
            return v
    return 0


def sigma(inst: ForestInstance, S: Iterable[int], i: int) -> VertexSubset:
    """Descendants of i not lying below another member of S strictly inside R+(i)."""
    subset = S if isinstance(S, frozenset) else frozenset(S)
    members = [i]
    stack = list(inst.children_of(i))
    while stack:
        v = stack.pop()
        if v in subset:
            continue
        members.append(v)
        stack.extend(inst.children_of(v))
    return frozenset(members)


def anchors(inst: ForestInstance, S: VertexSubset) -> np.ndarray:
    """i_triangle(S, i) for every vertex at once (index 0 unused)."""
    anchor = np.zeros(inst.n + 1, dtype=int)
    for v in inst.order:
        anchor[v] = v if v in S else anchor[inst.parent[v]]
    return anchor


def anchor_value(inst: ForestInstance, S: VertexSubset, a: int) -> float:
    """Coordinate value contributed by anchor a under S."""
    if a == 0:
        return 0.0
    if a in inst.psi and inst.psi_child(a) not in S:
        return floor_bound(inst.bound(a))
    return inst.bound(a)


def extreme_point(inst: ForestInstance, S: Iterable[int]) -> np.ndarray:
    """P(S); entries take the bound of each vertex's anchor, floored at Psi members whose child is outside S."""
    require_hull_assumptions(inst)
    subset = as_subset(inst, S)
    anchor = anchors(inst, subset)
    values = {a: anchor_value(inst, subset, a) for a in set(anchor[1:].tolist())}
    return np.array([values[anchor[v]] for v in inst.vertices], dtype=float)


def point_key(z: np.ndarray, decimals: int = None) -> Tuple[float, ...]:
    if decimals is None:
        decimals = settings.MEMO_DECIMALS
    return tuple(np.round(z, decimals).tolist())


def enumerate_extreme_points(
    inst: ForestInstance, canonical: bool = False, limit: int = None
) -> Iterator[Tuple[VertexSubset, np.ndarray]]:
    """Yields (S, P(S)) for every S; with canonical=True each distinct point once."""
    if limit is None:
        limit = settings.MAX_HULL_ENUMERATION
    if inst.n > limit:
        raise TooLarge(f"Enumerating 2^{inst.n} subsets exceeds the limit of 2^{limit}")
    require_hull_assumptions(inst)
    seen = set()
    for mask in range(1 << inst.n):
        S = subset_from_mask(mask, inst.n)
        point = extreme_point(inst, S)
        if canonical:
            key = point_key(point)
            if key in seen:
                continue
            seen.add(key)
        yield S, point
