import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import numpy as np

from ..config.settings import settings
from ..exceptions import NotAPsiRoot
from ..forest.instance import ForestInstance
from ..forest.rounding import ceil_bound, floor_bound
from ..hull.extreme import extreme_point, require_hull_assumptions, sigma
from .certificate import DualCertificate

logger = logging.getLogger(__name__)


class SubtreeCase(str, Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    C4 = "C4"


@dataclass
class SubtreeSolution:
    psi: int
    subset: FrozenSet[int]
    certificate: DualCertificate
    case: SubtreeCase
    s_rho: float


@dataclass
class LinOptResult:
    z: np.ndarray
    objective: float
    certificate: DualCertificate
    subset: FrozenSet[int]
    cases: Dict[int, SubtreeCase] = field(default_factory=dict)


def s_values(
    inst: ForestInstance, a: np.ndarray, S_next: Iterable[int], depth_level: int
) -> Dict[int, float]:
    """s^i = sum of a_j over sigma_i(S_next), for every vertex i at depth depth_level."""
    a = np.asarray(a, dtype=float)
    subset = frozenset(S_next)
    return {
        i: float(sum(a[j - 1] for j in sigma(inst, subset, i)))
        for i in inst.vertices if inst.depth[i] == depth_level
    }


def _recursion(
    inst: ForestInstance, a: np.ndarray, active: Set[int]
) -> Tuple[Set[int], Dict[int, float]]:
    """
    Bottom-up s-values over an ancestor-closed (or subtree) vertex set:
    s^i = a_i + sum of s^c over active children c not selected.
    """
    band = settings.ZERO_BAND
    selected: Set[int] = set()
    s: Dict[int, float] = {}
    for v in reversed(inst.order):
        if v not in active:
            continue
        value = a[v - 1]
        for c in inst.children_of(v):
            if c in active and c not in selected:
                value += s[c]
        s[v] = value
        if value < -band:
            selected.add(v)
    return selected, s


def _plain_dual(inst: ForestInstance, active: Set[int], selected: Set[int], s: Dict[int, float]) -> DualCertificate:
    cert = DualCertificate()
    for v in active:
        cert.p[v] = min(0.0, s[v]) if v in selected else 0.0
    for i, j in inst.arcs:
        if i in active and j in active:
            cert.q[(i, j)] = 0.0 if j in selected else min(0.0, -s[j])
    return cert


def solve_subtree_psi(inst: ForestInstance, a: np.ndarray, psi: int) -> SubtreeSolution:
    """
    Optimal S* and closed-form dual for min a^T z over the hull restricted to
    the subtree rooted at psi, selected by comparing -s^rho against the
    thresholds min(0, a_psi) and f * min(0, a_psi) with f = u_psi - floor(u_psi).
    """
    a = np.asarray(a, dtype=float)
    if psi not in inst.psi:
        raise NotAPsiRoot(f"Vertex {psi} is not a fractional-bounded vertex with an integer descendant")
    rho = inst.psi_child(psi)
    if rho is None:
        raise NotAPsiRoot(f"Vertex {psi} does not have a single child; normalize the instance first")

    tol = settings.CASE_TOL
    members = inst.descendants[psi]
    deep = set(members - {psi, rho})
    S2, s = _recursion(inst, a, deep)
    s_rho = a[rho - 1] + sum(s[c] for c in inst.children_of(rho) if c not in S2)
    s[rho] = s_rho

    u = inst.bound(psi)
    frac = u - floor_bound(u)
    a_psi = a[psi - 1]
    r_sum = min(0.0, a_psi)

    if -s_rho <= r_sum + tol:
        case, subset = SubtreeCase.C1, set(S2)
    elif -s_rho <= frac * r_sum + tol:
        case, subset = SubtreeCase.C2, S2 | {psi}
    elif -s_rho <= tol:
        case, subset = SubtreeCase.C3, S2 | {psi, rho}
    else:
        case, subset = SubtreeCase.C4, S2 | {rho} | ({psi} if a_psi < 0 else set())

    cert = _plain_dual(inst, deep, S2, s)
    for c in inst.children_of(rho):
        cert.q[(rho, c)] = 0.0 if c in S2 else min(0.0, -s[c])
    cert.p[psi] = 0.0

    if case == SubtreeCase.C1:
        cert.p[rho] = 0.0
        cert.q[(psi, rho)] = min(0.0, -s_rho)
        cert.r[psi] = 0.0
    elif case == SubtreeCase.C2:
        r = min(0.0, frac / (ceil_bound(u) - u) * (a_psi + s_rho))
        cert.p[rho] = 0.0
        cert.q[(psi, rho)] = min(0.0, -s_rho - r)
        cert.r[psi] = r
    elif case == SubtreeCase.C3:
        cert.p[rho] = min(0.0, frac * a_psi + s_rho)
        cert.q[(psi, rho)] = 0.0
        cert.r[psi] = min(0.0, frac * a_psi)
    else:
        cert.p[rho] = min(0.0, s_rho)
        cert.q[(psi, rho)] = 0.0
        cert.p[psi] = min(0.0, a_psi) if psi in subset else 0.0
        cert.r[psi] = 0.0

    logger.debug(f"Subtree at {psi}: case {case.value}, s_rho={s_rho}, S*={sorted(subset)}")
    return SubtreeSolution(psi=psi, subset=frozenset(subset), certificate=cert, case=case, s_rho=float(s_rho))


def solve_tree(
    inst: ForestInstance, a: np.ndarray, root: int
) -> Tuple[FrozenSet[int], DualCertificate, Dict[int, SubtreeCase]]:
    """
    Solves every Psi subtree of the component, removes the subtrees hanging
    from the chosen vertices, and finishes with the plain recursion on what
    is left (an ancestor-closed set).
    """
    a = np.asarray(a, dtype=float)
    component = set(inst.descendants[root])
    subtrees = [solve_subtree_psi(inst, a, psi) for psi in sorted(inst.psi & component)]

    removed: Set[int] = set()
    for sol in subtrees:
        for k in sol.subset:
            removed |= inst.descendants[k]
    active = component - removed

    S0, s = _recursion(inst, a, active)
    cert = _plain_dual(inst, active, S0, s)
    for psi in inst.psi & active:
        cert.r[psi] = 0.0

    for sol in subtrees:
        sub = sol.certificate
        for v, value in sub.p.items():
            if v in removed:
                cert.p[v] = value
        for (i, j), value in sub.q.items():
            if i in removed and j in removed:
                cert.q[(i, j)] = value
        if sol.psi not in active:
            cert.r[sol.psi] = sub.r[sol.psi]
    for i, j in inst.arcs:
        if i in active and j in removed:
            cert.q[(i, j)] = 0.0

    subset = frozenset(S0) | frozenset().union(*(sol.subset for sol in subtrees))
    return subset, cert, {sol.psi: sol.case for sol in subtrees}


def solve_forest(inst: ForestInstance, a: np.ndarray) -> LinOptResult:
    """min a^T z over conv(Z(G,u)), one component at a time in root-id order."""
    require_hull_assumptions(inst)
    a = np.asarray(a, dtype=float)
    if a.shape != (inst.n,):
        raise ValueError(f"Objective has shape {a.shape}, expected ({inst.n},)")

    subset: FrozenSet[int] = frozenset()
    cert = DualCertificate()
    cases: Dict[int, SubtreeCase] = {}
    for root in inst.roots:
        part, part_cert, part_cases = solve_tree(inst, a, root)
        subset |= part
        cert.update(part_cert)
        cases.update(part_cases)

    z = extreme_point(inst, subset)
    objective = float(a @ z)
    logger.debug(f"Linear optimization over the hull: objective {objective}, S*={sorted(subset)}")
    return LinOptResult(z=z, objective=objective, certificate=cert, subset=subset, cases=cases)


def objective_for_extreme_point(inst: ForestInstance, S: Iterable[int]) -> np.ndarray:
    """
    An objective a for which solve_forest returns P(S): from the deepest level
    up, every s-value is made -1 on S and +1 elsewhere, and a_psi is placed in
    the case interval matching S on {psi, ch(psi)}.
    """
    require_hull_assumptions(inst)
    subset = frozenset(S)
    a = np.zeros(inst.n)
    for v in reversed(inst.order):
        if v in inst.psi:
            u = inst.bound(v)
            frac = u - floor_bound(u)
            rho = inst.psi_child(v)
            if v in subset:
                a[v - 1] = -1.0 if rho in subset else -(1.0 + 1.0 / frac) / 2.0
            else:
                a[v - 1] = 1.0 if rho in subset else 0.0
            continue
        target = -1.0 if v in subset else 1.0
        free_children = sum(1 for c in inst.children_of(v) if c not in subset)
        a[v - 1] = target - free_children
    return a
