import logging
from typing import Dict, List, Tuple

import numpy as np

from ..exceptions import InvalidPrefix
from ..forest.instance import ForestInstance
from ..forest.rounding import floor_bound

logger = logging.getLogger(__name__)


class PrefixTracker:
    """
    Incremental state of a partial permutation T: which vertices are placed,
    the deepest placed ascendant of every vertex, the candidate bookkeeping
    of the validity rules, and the current extreme point P(T).

    Placing a vertex costs O(|R+(v)| + depth(v)); a full permutation costs
    O(|V|^2) in the worst case.
    """

    def __init__(self, inst: ForestInstance):
        self.inst = inst
        n = inst.n
        self.bounds = inst.bounds
        self.placed = np.zeros(n + 1, dtype=bool)
        self.anchor = np.zeros(n + 1, dtype=int)
        self.point = np.zeros(n + 1)
        self.order: List[int] = []

        self.psi_child: Dict[int, int] = {psi: inst.psi_child(psi) for psi in inst.psi}
        self.psi_floor: Dict[int, float] = {psi: floor_bound(inst.bound(psi)) for psi in inst.psi}
        self.psi_of_child: Dict[int, int] = {c: psi for psi, c in self.psi_child.items()}

        # Unplaced strict descendants sharing the vertex's bound
        self.equal_pending = np.zeros(n + 1, dtype=int)
        for i in inst.vertices:
            u = self.bounds[i]
            self.equal_pending[i] = sum(1 for j in inst.descendants[i] if j != i and self.bounds[j] == u)

        # Psi members below v whose floor equals u_v
        self.floor_watchers: Dict[int, List[int]] = {}
        for psi in inst.psi:
            for v in inst.ascendants[psi][:-1]:
                if self.bounds[v] == self.psi_floor[psi]:
                    self.floor_watchers.setdefault(v, []).append(psi)
        self.floor_blocked = {psi: False for psi in inst.psi}

    def copy(self) -> "PrefixTracker":
        clone = PrefixTracker.__new__(PrefixTracker)
        clone.inst = self.inst
        clone.bounds = self.bounds
        clone.placed = self.placed.copy()
        clone.anchor = self.anchor.copy()
        clone.point = self.point.copy()
        clone.order = list(self.order)
        clone.psi_child = self.psi_child
        clone.psi_floor = self.psi_floor
        clone.psi_of_child = self.psi_of_child
        clone.equal_pending = self.equal_pending.copy()
        clone.floor_watchers = self.floor_watchers
        clone.floor_blocked = dict(self.floor_blocked)
        return clone

    def is_candidate(self, v: int) -> bool:
        if self.placed[v] or self.equal_pending[v] > 0:
            return False
        if v in self.psi_child and not self.placed[self.psi_child[v]]:
            if self.psi_floor[v] == 0 or self.floor_blocked[v]:
                return False
        return True

    def candidates(self) -> List[int]:
        return [v for v in self.inst.vertices if self.is_candidate(v)]

    def _case(self, v: int) -> Tuple[str, int]:
        a = int(self.anchor[v])
        if v in self.psi_child and not self.placed[self.psi_child[v]]:
            return "A", a
        if a in self.psi_child:
            return "B", a
        return "C", a

    def eta(self, psi: int, z_ext: np.ndarray) -> float:
        child = self.psi_child[psi]
        u_psi, u_ch = self.bounds[psi], self.bounds[child]
        return (z_ext[psi] - (u_psi - self.psi_floor[psi]) * z_ext[child]) / (u_ch - u_psi)

    def t_of(self, v: int, z_ext: np.ndarray) -> float:
        """t-value of appending v, with z_ext[0] = 0 as the sentinel coordinate."""
        case, a = self._case(v)
        if case == "A":
            denom = self.psi_floor[v] - self.bounds[a]
            numer = self.eta(v, z_ext) - z_ext[a]
        elif case == "B":
            denom = self.bounds[v] - self.psi_floor[a]
            numer = z_ext[v] - self.eta(a, z_ext)
        else:
            denom = self.bounds[v] - self.bounds[a]
            numer = z_ext[v] - z_ext[a]
        if denom <= 0:
            raise InvalidPrefix(
                f"Non-positive denominator {denom} for vertex {v} after prefix {self.order}",
                witness=list(self.order) + [v],
            )
        return float(numer / denom)

    def row_of(self, v: int) -> Dict[int, float]:
        """Coefficients of t(v) as a linear form in z (sentinel column dropped)."""
        case, a = self._case(v)
        row: Dict[int, float] = {}

        def add(vertex: int, value: float) -> None:
            if vertex != 0:
                row[vertex] = row.get(vertex, 0.0) + value

        if case == "A":
            child = self.psi_child[v]
            denom = self.psi_floor[v] - self.bounds[a]
            spread = self.bounds[child] - self.bounds[v]
            frac = self.bounds[v] - self.psi_floor[v]
            add(v, 1.0 / (spread * denom))
            add(child, -frac / (spread * denom))
            add(a, -1.0 / denom)
        elif case == "B":
            child = self.psi_child[a]
            denom = self.bounds[v] - self.psi_floor[a]
            spread = self.bounds[child] - self.bounds[a]
            frac = self.bounds[a] - self.psi_floor[a]
            add(v, 1.0 / denom)
            add(a, -1.0 / (spread * denom))
            add(child, frac / (spread * denom))
        else:
            denom = self.bounds[v] - self.bounds[a]
            add(v, 1.0 / denom)
            add(a, -1.0 / denom)
        if denom <= 0:
            raise InvalidPrefix(
                f"Non-positive denominator {denom} for vertex {v} after prefix {self.order}",
                witness=list(self.order) + [v],
            )
        return row

    def _anchor_value(self, v: int) -> float:
        if v in self.psi_child and not self.placed[self.psi_child[v]]:
            return self.psi_floor[v]
        return self.bounds[v]

    def place(self, v: int) -> None:
        inst = self.inst
        self.placed[v] = True
        self.order.append(v)
        depth_v = inst.depth[v]
        value = self._anchor_value(v)
        depth = inst.depth
        anchor = self.anchor
        for w in inst.descendants[v]:
            a = anchor[w]
            if a == 0 or depth[a] < depth_v:
                anchor[w] = v
                self.point[w] = value
        for i in inst.ascendants[v][:-1]:
            if self.bounds[i] == self.bounds[v]:
                self.equal_pending[i] -= 1
        for psi in self.floor_watchers.get(v, ()):
            self.floor_blocked[psi] = True
        psi = self.psi_of_child.get(v)
        if psi is not None and self.placed[psi] and anchor[psi] == psi:
            self.point[psi] = self.bounds[psi]

    def current_point(self) -> np.ndarray:
        return self.point[1:].copy()
