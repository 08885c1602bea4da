import logging
from typing import List, Optional

import numpy as np

from ..forest.instance import ForestInstance, build_instance
from ..forest.oracle import QuadraticSpec
from ..forest.rounding import ceil_bound, is_integral
from ..hull.extreme import extreme_point

logger = logging.getLogger(__name__)

BOUND_VALUES = np.array(
    [float(k) for k in range(1, 13)] + [k + f for k in range(12) for f in (0.25, 0.5, 0.75)]
)


def random_instance(
    rng: np.random.Generator,
    n: int,
    root_probability: float = 0.3,
    integer_probability: float = 0.5,
    property1: bool = True,
) -> ForestInstance:
    """
    Random forest instance satisfying Assumptions 1 and 2 (and Property 1
    unless property1=False).

    Vertices attach to a random earlier vertex or start a new tree with
    root_probability; labels are shuffled afterwards. Bounds are drawn from
    1..12 and k + 0.25/0.5/0.75, raised to keep them monotone. A continuous
    vertex with a fractional bound and an integer descendant becomes a member
    of Psi: its children are made integer and its whole subtree takes the
    bound ceil(u_psi). With property1=True such a vertex must have a single
    child, otherwise its bound is rounded up.
    """
    parent = [-1] * n
    for v in range(1, n):
        if rng.random() >= root_probability:
            parent[v] = int(rng.integers(v))
    children: List[List[int]] = [[] for _ in range(n)]
    for v, p in enumerate(parent):
        if p >= 0:
            children[p].append(v)
    integer = [bool(rng.random() < integer_probability) for _ in range(n)]

    has_integer_below = list(integer)
    for v in reversed(range(n)):
        for c in children[v]:
            has_integer_below[v] = has_integer_below[v] or has_integer_below[c]

    bounds = [0.0] * n
    zone = [None] * n
    for v in range(n):
        p = parent[v]
        floor_value = bounds[p] if p >= 0 else 0.0
        if p >= 0 and zone[p] is not None:
            zone[v] = zone[p]
            bounds[v] = ceil_bound(bounds[zone[v]])
            continue
        draw = float(rng.choice(BOUND_VALUES))
        if integer[v]:
            bounds[v] = max(float(np.floor(draw)), ceil_bound(floor_value), 1.0)
            continue
        value = max(draw, floor_value)
        if not is_integral(value) and has_integer_below[v]:
            if property1 and len(children[v]) != 1:
                value = ceil_bound(value)
            else:
                zone[v] = v
                for c in children[v]:
                    integer[c] = True
        bounds[v] = value

    labels = rng.permutation(n) + 1
    arcs = [(int(labels[p]), int(labels[v])) for v, p in enumerate(parent) if p >= 0]
    relabeled = [0.0] * n
    for v in range(n):
        relabeled[labels[v] - 1] = bounds[v]
    integer_ids = [int(labels[v]) for v in range(n) if integer[v]]
    return build_instance(n, arcs, relabeled, integer_ids)


def random_quadratic(rng: np.random.Generator, n: int, density: float = 0.6, linear_scale: float = 10.0) -> QuadraticSpec:
    """z^T Q z + c^T z with every entry of Q non-positive, hence DR-submodular."""
    mask = rng.random((n, n)) < density
    Q = -rng.random((n, n)) * mask
    Q = (Q + Q.T) / 2.0
    c = rng.uniform(-linear_scale, linear_scale, size=n)
    return QuadraticSpec(Q, c)


def random_linear_objective(rng: np.random.Generator, inst: ForestInstance, scale: float = 5.0) -> np.ndarray:
    return rng.uniform(-scale, scale, size=inst.n)


def random_hull_point(rng: np.random.Generator, inst: ForestInstance, terms: Optional[int] = None) -> np.ndarray:
    """Random convex combination of P(S) over random subsets S."""
    terms = terms or int(rng.integers(1, inst.n + 2))
    weights = rng.dirichlet(np.ones(terms))
    point = np.zeros(inst.n)
    for weight in weights:
        S = [v for v in inst.vertices if rng.random() < 0.5]
        point += weight * extreme_point(inst, S)
    return point
