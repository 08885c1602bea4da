import logging
from typing import Dict, List, Tuple

import numpy as np

from ..exceptions import Assumption1Violated, InfeasibleInput
from .instance import ForestInstance, build_instance, check_assumption1
from .oracle import LiftedOracle, ValueOracle
from .rounding import ceil_bound

logger = logging.getLogger(__name__)


class VertexMap:
    """Vertices 1..original_count are unchanged; each inserted vertex maps to the Psi member above it."""

    def __init__(self, original_count: int, inserted: Dict[int, int]):
        self.original_count = original_count
        self.inserted = dict(sorted(inserted.items()))

    def __repr__(self) -> str:
        return f"VertexMap(original_count={self.original_count}, inserted={self.inserted})"

    @property
    def is_identity(self) -> bool:
        return not self.inserted

    def to_original(self, v: int):
        """Original id of v, or None for an inserted vertex."""
        return None if v in self.inserted else v


def normalize_property1(
    inst: ForestInstance, oracle: ValueOracle
) -> Tuple[ForestInstance, ValueOracle, VertexMap]:
    """
    Inserts an integer vertex rho with u_rho = ceil(u_psi) between every psi
    in Psi and its children, unless psi already has a single integer child
    with that bound. The returned oracle ignores the inserted coordinates.
    """
    check = check_assumption1(inst)
    if not check.holds:
        raise Assumption1Violated(check.message, witness=check.witness)

    arcs: List[Tuple[int, int]] = list(inst.arcs)
    bounds = list(inst.upper_bounds)
    integer = set(inst.integer_vertices)
    inserted: Dict[int, int] = {}
    next_id = inst.n + 1

    for psi in sorted(inst.psi):
        child = inst.psi_child(psi)
        target = ceil_bound(inst.bound(psi))
        if child is not None and child in integer and inst.bound(child) == target:
            continue
        rho = next_id
        next_id += 1
        former = inst.children_of(psi)
        arcs = [a for a in arcs if a[0] != psi]
        arcs.append((psi, rho))
        arcs.extend((rho, c) for c in former)
        bounds.append(target)
        integer.add(rho)
        inserted[rho] = psi
        logger.debug(f"Inserted vertex {rho} (u={target}) below {psi}, above {list(former)}")

    if not inserted:
        return inst, oracle, VertexMap(inst.n, {})

    extended = build_instance(next_id - 1, arcs, bounds, integer, flags=list(inst.flags))
    logger.info(f"Property 1 normalization inserted {len(inserted)} vertices")
    return extended, LiftedOracle(oracle, extended.n), VertexMap(inst.n, inserted)


def map_solution_back(x: np.ndarray, vertex_map: VertexMap) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[0] != vertex_map.original_count + len(vertex_map.inserted):
        raise InfeasibleInput(f"Point of length {x.shape[0]} does not match the extended instance")
    return x[: vertex_map.original_count].copy()


def lift_solution(z: np.ndarray, extended: ForestInstance, vertex_map: VertexMap) -> np.ndarray:
    """x_rho = ceil(z_psi) for every inserted rho; ceil(0) = 0."""
    z = np.asarray(z, dtype=float)
    if z.shape != (vertex_map.original_count,):
        raise InfeasibleInput(f"Point has shape {z.shape}, expected ({vertex_map.original_count},)")
    extra = [ceil_bound(z[psi - 1]) for rho, psi in vertex_map.inserted.items()]
    x = np.concatenate([z, np.asarray(extra, dtype=float)])
    problems = extended.feasibility_violations(x)
    if problems:
        raise InfeasibleInput(f"Lifted point is infeasible: {problems[0]}", witness=problems)
    return x
