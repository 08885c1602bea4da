from enum import Enum
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field

from ..config.settings import settings


class SolveStatus(str, Enum):
    OPTIMAL = "Optimal"
    DEGRADED = "Degraded"


class SolverOptions(BaseModel):
    epsilon: float = Field(default_factory=lambda: settings.VIOLATION_TOL, gt=0,
                           description="Stop once the most violated DR cut is violated by at most epsilon.")
    max_iterations: Optional[int] = Field(default=None, gt=0,
                                          description="Master solves allowed; default 10 * 2^min(|V|, 12).")
    seed_point: Literal["zero", "upper"] = Field(default="zero",
                                                 description="Point whose greedy cut seeds the pool.")
    check_dr: bool = Field(default=False, description="Check DR-submodularity of the oracle before solving.")
    allow_degraded: bool = Field(default=True,
                                 description="Relax bounds violating Assumption 2 instead of raising.")
    certify_degraded_by_bruteforce: bool = Field(default=True,
                                                 description="Enumerate extreme points of the original set in degraded mode.")
    seed: int = Field(default=0, description="Seed of the sampled DR check.")


class SolveReport(BaseModel):
    status: SolveStatus
    point: List[float] = Field(description="z*, in the caller's vertex ids.")
    value: float = Field(description="f(z*).")
    master_bound: float = Field(description="w at the last master solve; a lower bound on the minimum.")
    iterations: int = Field(description="Master LP solves.")
    cuts_generated: int = Field(description="Distinct DR cuts in the pool, seed included.")
    cuts_merged: int = Field(default=0, description="Separated cuts already in the pool.")
    final_violation: float = Field(description="Violation of the last separated cut.")
    recovery_index: int = Field(description="k of the prefix point P(delta, k) returned as z*.")
    recovery_permutation: List[int] = Field(description="delta of the decomposition of the last master point.")
    bound_history: List[float] = Field(default_factory=list, description="Master bound per iteration.")
    oracle_evaluations: int = 0
    oracle_cache_hits: int = 0
    inserted_vertices: Dict[str, int] = Field(default_factory=dict,
                                              description="Vertices added for Property 1, mapped to their Psi member.")
    relaxed_vertices: List[int] = Field(default_factory=list,
                                        description="Psi members whose bound was rounded up in degraded mode.")
    bruteforce_value: Optional[float] = Field(default=None,
                                              description="Exhaustive minimum over the original extreme points.")
    bruteforce_point: Optional[List[float]] = None
    flags: List[str] = Field(default_factory=list)
    wall_time: float = Field(description="Seconds spent in minimize.")
