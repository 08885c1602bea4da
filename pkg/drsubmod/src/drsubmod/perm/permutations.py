import logging
from typing import Dict, FrozenSet, Iterator, List, Sequence, Union

from pydantic import BaseModel, Field

from ..config.settings import settings
from ..exceptions import InvalidPartial, NotAPermutation, TooLarge
from ..forest.instance import ForestInstance
from ..hull.extreme import require_hull_assumptions
from .tracker import PrefixTracker

logger = logging.getLogger(__name__)


class Permutation:
    """An ordering delta(1..n) of the vertices with its inverse (1-based positions)."""

    def __init__(self, order: Sequence[int]):
        self.order = tuple(int(v) for v in order)
        self.inverse: Dict[int, int] = {v: k for k, v in enumerate(self.order, start=1)}

    def __repr__(self) -> str:
        return f"Permutation({list(self.order)})"

    def __iter__(self):
        return iter(self.order)

    def __len__(self) -> int:
        return len(self.order)

    def __getitem__(self, k):
        return self.order[k]

    def __eq__(self, other) -> bool:
        if isinstance(other, Permutation):
            return self.order == other.order
        return self.order == tuple(other)

    def __hash__(self) -> int:
        return hash(self.order)

    def position(self, v: int) -> int:
        return self.inverse[v]


PermutationLike = Union[Permutation, Sequence[int]]


def as_permutation(inst: ForestInstance, delta: PermutationLike) -> Permutation:
    perm = delta if isinstance(delta, Permutation) else Permutation(delta)
    if sorted(perm.order) != list(inst.vertices):
        raise NotAPermutation(f"{list(perm.order)} is not a permutation of 1..{inst.n}", witness=list(perm.order))
    return perm


class PermutationCheck(BaseModel):
    valid: bool = Field(description="True when all three ordering conditions hold.")
    violated_conditions: List[int] = Field(default_factory=list, description="Subset of {1, 2, 3}.")
    witnesses: Dict[int, List[int]] = Field(default_factory=dict, description="One offending vertex tuple per condition.")


def is_valid_permutation(inst: ForestInstance, delta: PermutationLike) -> PermutationCheck:
    """
    (1) an equal-bound descendant comes before its ascendant;
    (2) ch(psi) comes before psi when floor(u_psi) = 0;
    (3) no ascendant i with u_i = floor(u_psi) has pos(i) < pos(psi) < pos(ch(psi)).
    """
    require_hull_assumptions(inst)
    perm = as_permutation(inst, delta)
    pos = perm.inverse
    tracker = PrefixTracker(inst)
    witnesses: Dict[int, List[int]] = {}

    for i in inst.vertices:
        for j in sorted(inst.descendants[i]):
            if j != i and inst.bound(j) == inst.bound(i) and pos[i] < pos[j]:
                witnesses.setdefault(1, [i, j])

    for psi in sorted(inst.psi):
        child = tracker.psi_child[psi]
        floor = tracker.psi_floor[psi]
        if floor == 0 and pos[child] > pos[psi]:
            witnesses.setdefault(2, [psi, child])
        for i in inst.ascendants[psi][:-1]:
            if inst.bound(i) == floor and pos[i] < pos[psi] < pos[child]:
                witnesses.setdefault(3, [i, psi, child])

    violated = sorted(witnesses)
    return PermutationCheck(valid=not violated, violated_conditions=violated, witnesses=witnesses)


def _replay(inst: ForestInstance, partial: Sequence[int]) -> PrefixTracker:
    tracker = PrefixTracker(inst)
    for v in partial:
        if not 1 <= v <= inst.n or tracker.placed[v]:
            raise InvalidPartial(f"{list(partial)} repeats or leaves the vertex range at {v}", witness=list(partial))
        if not tracker.is_candidate(v):
            raise InvalidPartial(f"Placing {v} after {tracker.order} breaks validity", witness=tracker.order + [v])
        tracker.place(v)
    return tracker


def valid_candidates(inst: ForestInstance, partial: Sequence[int]) -> FrozenSet[int]:
    """Unplaced vertices whose appending keeps the partial permutation valid."""
    require_hull_assumptions(inst)
    tracker = _replay(inst, list(partial))
    return frozenset(tracker.candidates())


def enumerate_valid_permutations(inst: ForestInstance, limit: int = None) -> Iterator[Permutation]:
    """Every valid permutation, by backtracking over the candidate sets."""
    if limit is None:
        limit = settings.MAX_PERMUTATION_ENUMERATION
    if inst.n > limit:
        raise TooLarge(f"Enumerating permutations of {inst.n} vertices exceeds the limit of {limit}")
    require_hull_assumptions(inst)

    def extend(tracker: PrefixTracker) -> Iterator[Permutation]:
        if len(tracker.order) == inst.n:
            yield Permutation(tracker.order)
            return
        for v in tracker.candidates():
            branch = tracker.copy()
            branch.place(v)
            yield from extend(branch)

    yield from extend(PrefixTracker(inst))
