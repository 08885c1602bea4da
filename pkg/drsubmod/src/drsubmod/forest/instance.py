import logging
from enum import Enum
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from pydantic import BaseModel, Field

from ..config.settings import settings
from ..exceptions import (
    InfeasibleInput,
    InstanceFormatError,
    NonMonotoneBounds,
    NonPositiveBound,
    NotAForest,
)
from .rounding import ceil_bound, is_integral, round_down_to_integer, snap

logger = logging.getLogger(__name__)

Arc = Tuple[int, int]


class InstanceClass(str, Enum):
    BOX_ONLY = "box_only"
    ALL_INTEGER = "all_integer"
    ALL_CONTINUOUS = "all_continuous"
    INTEGER_BOUNDS = "integer_bounds"
    GENERAL = "general"


class AssumptionCheck(BaseModel):
    """Outcome of an assumption check, with the offending path or pair on failure."""
    holds: bool = Field(description="True when the assumption is satisfied.")
    witness: Optional[List[int]] = Field(default=None, description="Violating path or vertex pair.")
    message: str = Field(default="", description="Human readable explanation.")


class ForestInstance:
    """
    The feasible set Z(G,u): 0 <= z <= u, z_i <= z_j on every arc (i,j) of a
    directed rooted forest, and z_i integral for i in the integer set N.

    Vertices are 1..n. Index 0 is the sentinel with u_0 = 0; it acts as the
    parent of every root, so children_of(0) lists the roots.
    Instances are immutable; use build_instance for raw input.
    """

    def __init__(
        self,
        vertex_count: int,
        arcs: Iterable[Arc],
        upper_bounds: Sequence[float],
        integer_vertices: Iterable[int],
        flags: Optional[List[str]] = None,
    ):
        self.n = int(vertex_count)
        self.arcs: Tuple[Arc, ...] = tuple(sorted((int(i), int(j)) for i, j in arcs))
        bounds = np.zeros(self.n + 1)
        bounds[1:] = np.asarray(upper_bounds, dtype=float)
        bounds.setflags(write=False)
        self.bounds = bounds
        self.integer_vertices: FrozenSet[int] = frozenset(int(i) for i in integer_vertices)
        self.flags: List[str] = list(flags or [])

        parent = np.zeros(self.n + 1, dtype=int)
        children: List[List[int]] = [[] for _ in range(self.n + 1)]
        for i, j in self.arcs:
            parent[j] = i
        for v in range(1, self.n + 1):
            children[parent[v]].append(v)
        self.parent = parent
        self.children: Tuple[Tuple[int, ...], ...] = tuple(tuple(sorted(c)) for c in children)

        depth = np.full(self.n + 1, -1, dtype=int)
        order: List[int] = []
        frontier = list(self.children[0])
        for root in frontier:
            depth[root] = 0
        while frontier:
            nxt = []
            for v in frontier:
                order.append(v)
                for c in self.children[v]:
                    depth[c] = depth[v] + 1
                    nxt.append(c)
            frontier = nxt
        self.depth = depth
        # Parents precede children
        self.order: Tuple[int, ...] = tuple(order)

    def __repr__(self) -> str:
        return f"ForestInstance(n={self.n}, arcs={len(self.arcs)}, integer={len(self.integer_vertices)})"

    @property
    def upper_bounds(self) -> np.ndarray:
        return self.bounds[1:].copy()

    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    @property
    def roots(self) -> Tuple[int, ...]:
        return self.children[0]

    def bound(self, i: int) -> float:
        return float(self.bounds[i])

    def is_integer(self, i: int) -> bool:
        return i in self.integer_vertices

    def children_of(self, i: int) -> Tuple[int, ...]:
        return self.children[i]

    @cached_property
    def ascendants(self) -> Tuple[Tuple[int, ...], ...]:
        """R^-(i) as the path root -> i (both ends included); index 0 is empty."""
        paths: List[Tuple[int, ...]] = [()] * (self.n + 1)
        for v in self.order:
            paths[v] = paths[self.parent[v]] + (v,)
        return tuple(paths)

    @cached_property
    def descendants(self) -> Tuple[FrozenSet[int], ...]:
        """R^+(i) including i; index 0 is empty."""
        desc: List[FrozenSet[int]] = [frozenset()] * (self.n + 1)
        for v in reversed(self.order):
            members = {v}
            for c in self.children[v]:
                members |= desc[c]
            desc[v] = frozenset(members)
        return tuple(desc)

    @cached_property
    def psi(self) -> FrozenSet[int]:
        """Vertices with a finite fractional bound and at least one integer descendant."""
        has_integer_below = np.zeros(self.n + 1, dtype=bool)
        for v in reversed(self.order):
            has_integer_below[v] = v in self.integer_vertices or any(
                has_integer_below[c] for c in self.children[v]
            )
        return frozenset(
            v for v in self.vertices
            if np.isfinite(self.bounds[v]) and not is_integral(self.bounds[v]) and has_integer_below[v]
        )

    def psi_child(self, psi: int) -> Optional[int]:
        """ch(psi) when psi has exactly one child, otherwise None."""
        kids = self.children[psi]
        return kids[0] if len(kids) == 1 else None

    def satisfies_property1(self) -> bool:
        for psi in self.psi:
            child = self.psi_child(psi)
            if child is None or child not in self.integer_vertices:
                return False
            if self.bounds[child] != ceil_bound(self.bounds[psi]):
                return False
        return True

    @cached_property
    def hull_ready(self) -> "AssumptionCheck":
        """Assumption 1 plus Property 1, the preconditions of the hull machinery."""
        check = check_assumption1(self)
        if not check.holds:
            return check
        if not self.satisfies_property1():
            offending = sorted(
                psi for psi in self.psi
                if self.psi_child(psi) is None
                or self.psi_child(psi) not in self.integer_vertices
                or self.bounds[self.psi_child(psi)] != ceil_bound(self.bounds[psi])
            )
            return AssumptionCheck(
                holds=False,
                witness=offending,
                message=f"Property 1 fails at {offending}; run normalize_property1 first",
            )
        return AssumptionCheck(holds=True)

    def component_roots(self) -> Tuple[int, ...]:
        return self.roots

    def component_of(self, root: int) -> List[int]:
        """Vertices of the tree rooted at root, parents before children."""
        members = self.descendants[root]
        return [v for v in self.order if v in members]

    def has_infinite_bounds(self) -> bool:
        return not bool(np.all(np.isfinite(self.bounds)))

    def feasibility_violations(self, z: np.ndarray, tol: float = None, integrality: bool = True) -> List[str]:
        """Box, monotonicity and (optionally) integrality violations of a point."""
        if tol is None:
            tol = settings.MEMBERSHIP_TOL
        z = np.asarray(z, dtype=float)
        if z.shape != (self.n,):
            return [f"point has shape {z.shape}, expected ({self.n},)"]
        problems = []
        for i in self.vertices:
            value = z[i - 1]
            if value < -tol:
                problems.append(f"z_{i} = {value} < 0")
            if value > self.bounds[i] + tol:
                problems.append(f"z_{i} = {value} > u_{i} = {self.bounds[i]}")
            if integrality and i in self.integer_vertices and abs(value - round(value)) > tol:
                problems.append(f"z_{i} = {value} is not integral")
        for i, j in self.arcs:
            if z[i - 1] > z[j - 1] + tol:
                problems.append(f"z_{i} = {z[i - 1]} > z_{j} = {z[j - 1]}")
        return problems

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "arcs": [list(a) for a in self.arcs],
            "u": [None if not np.isfinite(b) else float(b) for b in self.bounds[1:]],
            "integer": sorted(self.integer_vertices),
        }


def _check_topology(vertex_count: int, arcs: Sequence[Arc]) -> None:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(1, vertex_count + 1))
    for i, j in arcs:
        if not (1 <= i <= vertex_count and 1 <= j <= vertex_count):
            raise NotAForest(f"Arc ({i},{j}) references a vertex outside 1..{vertex_count}", witness=[i, j])
        if i == j:
            raise NotAForest(f"Self loop on vertex {i}", witness=[i, j])
        if graph.has_edge(i, j):
            raise NotAForest(f"Duplicate arc ({i},{j})", witness=[i, j])
        graph.add_edge(i, j)

    multi_parent = [v for v, d in graph.in_degree() if d > 1]
    if multi_parent:
        v = multi_parent[0]
        raise NotAForest(f"Vertex {v} has more than one parent", witness=[v, *sorted(graph.predecessors(v))])
    if not nx.is_directed_acyclic_graph(graph):
        cycle = [i for i, _ in nx.find_cycle(graph)]
        raise NotAForest(f"Directed cycle through {cycle}", witness=cycle)
    if not nx.is_forest(graph.to_undirected()):
        cycle = [i for i, _ in nx.find_cycle(graph.to_undirected())]
        raise NotAForest(f"Undirected cycle through {cycle}", witness=cycle)


def build_instance(
    vertex_count: int,
    arcs: Iterable[Sequence[int]],
    upper_bounds: Sequence[Optional[float]],
    integer_vertices: Iterable[int],
    flags: Optional[List[str]] = None,
) -> ForestInstance:
    """
    Validates raw input and applies the standard normalizations: integer
    bounds are rounded down, non-positive bounds and bounds decreasing along
    an arc are rejected.
    """
    if int(vertex_count) < 1:
        raise InstanceFormatError(f"vertex_count must be positive, got {vertex_count}")
    n = int(vertex_count)
    arc_list = [(int(a[0]), int(a[1])) for a in arcs]
    if len(upper_bounds) != n:
        raise InstanceFormatError(f"Expected {n} upper bounds, got {len(upper_bounds)}")
    integer = sorted({int(i) for i in integer_vertices})
    outside = [i for i in integer if not 1 <= i <= n]
    if outside:
        raise InstanceFormatError(f"Integer vertices outside 1..{n}: {outside}")

    _check_topology(n, arc_list)

    bounds = []
    for i, raw in enumerate(upper_bounds, start=1):
        value = np.inf if raw is None else float(raw)
        if np.isnan(value):
            raise NonPositiveBound(f"u_{i} is NaN", witness=[i])
        if i in integer:
            rounded = round_down_to_integer(value)
            if rounded != value:
                logger.debug(f"Rounded u_{i} = {value} down to {rounded} (integer vertex)")
            value = rounded
        else:
            value = snap(value)
        if value <= 0:
            raise NonPositiveBound(f"u_{i} = {value} is not positive", witness=[i])
        bounds.append(value)

    for i, j in arc_list:
        if bounds[i - 1] > bounds[j - 1]:
            raise NonMonotoneBounds(
                f"u_{i} = {bounds[i - 1]} exceeds u_{j} = {bounds[j - 1]} on arc ({i},{j})",
                witness=[i, j],
            )

    return ForestInstance(n, arc_list, bounds, integer, flags=flags)


def reach_sets(inst: ForestInstance) -> Dict[str, object]:
    """R+, R-, depth, parent and children per vertex (1-based dictionaries)."""
    return {
        "descendants": {v: inst.descendants[v] for v in inst.vertices},
        "ascendants": {v: frozenset(inst.ascendants[v]) for v in inst.vertices},
        "depth": {v: int(inst.depth[v]) for v in inst.vertices},
        "parent": {v: int(inst.parent[v]) for v in inst.vertices if inst.parent[v] != 0},
        "children": {v: inst.children[v] for v in inst.vertices},
    }


def psi_set(inst: ForestInstance) -> FrozenSet[int]:
    return inst.psi


def check_assumption1(inst: ForestInstance) -> AssumptionCheck:
    """At most one member of Psi on any directed path, and Psi members only have integer children."""
    for psi in sorted(inst.psi):
        path = inst.ascendants[psi]
        for position, v in enumerate(path[:-1]):
            if v in inst.psi:
                return AssumptionCheck(
                    holds=False,
                    witness=list(path[position:]),
                    message=f"Path from {v} to {psi} contains two fractional-bounded vertices",
                )
        for child in inst.children[psi]:
            if child not in inst.integer_vertices:
                return AssumptionCheck(
                    holds=False,
                    witness=[psi, child],
                    message=f"Child {child} of {psi} is continuous",
                )
    return AssumptionCheck(holds=True)


def check_assumption2(inst: ForestInstance) -> AssumptionCheck:
    """Descendants of a Psi member with u > 1 are all bounded by its ceiling."""
    for psi in sorted(inst.psi):
        u_psi = inst.bound(psi)
        if u_psi <= 1:
            continue
        target = ceil_bound(u_psi)
        for i in sorted(inst.descendants[psi] - {psi}):
            if inst.bound(i) != target:
                return AssumptionCheck(
                    holds=False,
                    witness=[psi, i],
                    message=f"u_{i} = {inst.bound(i)} differs from ceil(u_{psi}) = {target}",
                )
    return AssumptionCheck(holds=True)


def classify_instance(inst: ForestInstance) -> InstanceClass:
    if not inst.arcs:
        return InstanceClass.BOX_ONLY
    if len(inst.integer_vertices) == inst.n:
        return InstanceClass.ALL_INTEGER
    if not inst.integer_vertices:
        return InstanceClass.ALL_CONTINUOUS
    if all(is_integral(inst.bound(i)) for i in inst.vertices):
        return InstanceClass.INTEGER_BOUNDS
    return InstanceClass.GENERAL


def finitize_bounds(inst: ForestInstance, default_root_bound: float = None) -> ForestInstance:
    """Replaces infinite bounds on the subtree of i by ceil(u_pa(i))."""
    if not inst.has_infinite_bounds():
        return inst
    if default_root_bound is None:
        default_root_bound = settings.DEFAULT_ROOT_BOUND
    bounds = inst.bounds.copy()
    flags = list(inst.flags)
    for i in inst.order:
        if np.isfinite(bounds[i]):
            continue
        pa = inst.parent[i]
        if pa == 0:
            value = max(1.0, round_down_to_integer(default_root_bound))
            flags.append(f"root-bound-default:{i}")
            logger.warning(
                f"Root {i} has an infinite bound and no parent; using {value}. "
                f"The optimum must be finite for this to be exact."
            )
        else:
            value = ceil_bound(bounds[pa])
        for j in inst.descendants[i]:
            bounds[j] = value
    return build_instance(inst.n, inst.arcs, list(bounds[1:]), inst.integer_vertices, flags=flags)


def relax_fractional_bounds(inst: ForestInstance, vertices: Optional[Iterable[int]] = None) -> ForestInstance:
    """
    Raises u_psi to ceil(u_psi) (and any smaller descendant bound with it)
    until no selected fractional-bounded vertex remains in Psi. The result's
    hull contains the original one.
    """
    current = inst
    selected = None if vertices is None else set(vertices)
    while True:
        targets = current.psi if selected is None else (current.psi & selected)
        if not targets:
            return current
        bounds = current.bounds.copy()
        for psi in sorted(targets):
            raised = ceil_bound(bounds[psi])
            for j in current.descendants[psi]:
                bounds[j] = max(bounds[j], raised)
        flags = list(current.flags) + [f"relaxed:{psi}" for psi in sorted(targets)]
        current = build_instance(current.n, current.arcs, list(bounds[1:]), current.integer_vertices, flags=flags)


def check_point_feasible(inst: ForestInstance, z: np.ndarray, tol: float = None) -> None:
    problems = inst.feasibility_violations(z, tol=tol)
    if problems:
        raise InfeasibleInput(f"Point is infeasible: {problems[0]}", witness=problems)
