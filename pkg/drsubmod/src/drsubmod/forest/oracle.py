import logging
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..config.settings import settings
from ..exceptions import InstanceFormatError, OracleEvaluationFailure
from .instance import ForestInstance

logger = logging.getLogger(__name__)


class QuadraticSpec:
    """f(z) = z^T Q z + c^T z with Q symmetric."""

    def __init__(self, Q: Sequence[Sequence[float]], c: Sequence[float]):
        self.Q = np.asarray(Q, dtype=float)
        self.c = np.asarray(c, dtype=float)
        n = self.c.shape[0]
        if self.Q.shape != (n, n):
            raise InstanceFormatError(f"Q has shape {self.Q.shape}, expected ({n}, {n})")
        if not np.allclose(self.Q, self.Q.T):
            raise InstanceFormatError("Q must be symmetric")

    def __call__(self, z: np.ndarray) -> float:
        return float(z @ self.Q @ z + self.c @ z)

    @property
    def dimension(self) -> int:
        return self.c.shape[0]

    def max_entry(self) -> float:
        return float(self.Q.max())


class TableObjective:
    """Lookup table over integer points, for all-integer instances."""

    def __init__(self, entries: Dict[Tuple[int, ...], float]):
        self.entries = dict(entries)

    def __call__(self, z: np.ndarray) -> float:
        key = tuple(int(round(v)) for v in z)
        if key not in self.entries:
            raise KeyError(f"No table entry for point {key}")
        return self.entries[key]


class ValueOracle:
    """
    Black-box evaluator of f, normalized so that the zero vector maps to 0.
    With memoize=True values are cached by the point rounded to
    settings.MEMO_DECIMALS digits.
    """

    def __init__(
        self,
        function: Callable[[np.ndarray], float],
        dimension: int,
        name: str = "oracle",
        memoize: bool = False,
        quadratic: Optional[QuadraticSpec] = None,
    ):
        self.function = function
        self.dimension = int(dimension)
        self.name = name
        self.memoize = memoize
        self.quadratic = quadratic
        self.evaluations = 0
        self.cache_hits = 0
        self._cache: Dict[Tuple[float, ...], float] = {}
        self.base_value = self._raw(np.zeros(self.dimension))

    def __repr__(self) -> str:
        return f"ValueOracle(name='{self.name}', dimension={self.dimension}, evaluations={self.evaluations})"

    @classmethod
    def from_quadratic(cls, spec: QuadraticSpec, memoize: bool = False) -> "ValueOracle":
        return cls(spec, spec.dimension, name="quadratic", memoize=memoize, quadratic=spec)

    def _raw(self, z: np.ndarray) -> float:
        self.evaluations += 1
        try:
            value = float(self.function(z))
        except Exception as e:
            raise OracleEvaluationFailure(f"Oracle '{self.name}' failed at {list(z)}: {e}") from e
        if not np.isfinite(value):
            raise OracleEvaluationFailure(f"Oracle '{self.name}' returned {value} at {list(z)}")
        return value

    def evaluate(self, z: np.ndarray) -> float:
        z = np.asarray(z, dtype=float)
        if z.shape != (self.dimension,):
            raise OracleEvaluationFailure(f"Point has shape {z.shape}, oracle expects ({self.dimension},)")
        if not self.memoize:
            return self._raw(z) - self.base_value
        key = tuple(np.round(z, settings.MEMO_DECIMALS).tolist())
        if key in self._cache:
            self.cache_hits += 1
            return self._cache[key]
        value = self._raw(z) - self.base_value
        self._cache[key] = value
        return value

    __call__ = evaluate


class LiftedOracle(ValueOracle):
    """F(x) = f(x restricted to the first original_count coordinates)."""

    def __init__(self, original: ValueOracle, extended_dimension: int):
        self.original = original
        self.original_count = original.dimension
        super().__init__(
            lambda x: original.evaluate(x[: self.original_count]),
            extended_dimension,
            name=f"lifted({original.name})",
            memoize=original.memoize,
        )


class DRCheckResult(BaseModel):
    passed: bool = Field(description="True when no violation below -tolerance was found.")
    worst_violation: float = Field(description="Most negative difference of increments found (0 if none).")
    method: str = Field(description="'hessian' for quadratic inputs, 'sampling' otherwise.")
    witness: Optional[Dict[str, List[float]]] = Field(default=None, description="x, y, coordinate and step.")


def check_dr_submodularity(
    oracle: ValueOracle,
    inst: ForestInstance,
    samples: int = None,
    seed: int = 0,
    tolerance: float = None,
) -> DRCheckResult:
    """
    Quadratic oracles are checked exactly (every entry of Q non-positive).
    Other oracles are sampled inside Z(G,u): x <= y, a coordinate i and a
    step alpha such that x + alpha e_i and y + alpha e_i stay feasible; the
    reported value is [f(x + alpha e_i) - f(x)] - [f(y + alpha e_i) - f(y)].
    Draws that leave Z(G,u) are discarded, so the oracle is never evaluated
    off the feasible set.
    """
    if tolerance is None:
        tolerance = settings.DR_TOL
    if oracle.quadratic is not None:
        worst = min(0.0, -oracle.quadratic.max_entry())
        return DRCheckResult(passed=worst >= -tolerance, worst_violation=worst, method="hessian")

    if samples is None:
        samples = settings.DR_SAMPLES
    rng = np.random.default_rng(seed)
    upper = inst.upper_bounds
    finite = upper[np.isfinite(upper)]
    cap = float(finite.max()) if finite.size else 1.0
    upper = np.where(np.isfinite(upper), upper, cap)
    integer_mask = np.array([inst.is_integer(i) for i in inst.vertices])

    def draw_between(low: np.ndarray) -> np.ndarray:
        point = low + rng.random(inst.n) * (upper - low)
        point = np.where(integer_mask, np.floor(point + settings.INTEGRALITY_TOL), point)
        # Monotone along arcs: a child never sits below its parent
        for v in inst.order:
            p = inst.parent[v]
            if p and point[v - 1] < point[p - 1]:
                value = point[p - 1]
                point[v - 1] = np.ceil(value - settings.INTEGRALITY_TOL) if integer_mask[v - 1] else value
        return point

    def feasible(point: np.ndarray) -> bool:
        return not inst.feasibility_violations(point)

    worst = 0.0
    witness = None
    evaluated = 0
    for _ in range(samples):
        x = draw_between(np.zeros(inst.n))
        y = draw_between(x)
        i = int(rng.integers(inst.n))
        room = upper[i] - y[i]
        if integer_mask[i]:
            if room < 1:
                continue
            alpha = float(rng.integers(1, int(round(room)) + 1))
        else:
            if room <= 1e-12:
                continue
            alpha = float(rng.uniform(0.0, room)) or room
        step = np.zeros(inst.n)
        step[i] = alpha
        if not all(feasible(p) for p in (x, y, x + step, y + step)):
            continue
        evaluated += 1
        gain_x = oracle.evaluate(x + step) - oracle.evaluate(x)
        gain_y = oracle.evaluate(y + step) - oracle.evaluate(y)
        diff = gain_x - gain_y
        if diff < worst:
            worst = diff
            witness = {"x": x.tolist(), "y": y.tolist(), "coordinate": [float(i + 1)], "alpha": [alpha]}
    logger.debug(f"Sampled DR check on {oracle.name}: {evaluated} of {samples} draws feasible, worst violation {worst}")
    return DRCheckResult(passed=worst >= -tolerance, worst_violation=worst, method="sampling", witness=witness)
