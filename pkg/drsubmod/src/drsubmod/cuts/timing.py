import logging
import time
from typing import Dict, Sequence

import numpy as np

from ..bruteforce.generators import random_hull_point, random_instance, random_quadratic
from ..forest.oracle import ValueOracle
from .dr_cut import separate

logger = logging.getLogger(__name__)


def time_separation(sizes: Sequence[int], repeats: int = 5, seed: int = 0) -> Dict[int, float]:
    """Median wall time of one separation per instance size, on random forests and quadratics."""
    rng = np.random.default_rng(seed)
    medians = {}
    for n in sizes:
        samples = []
        for _ in range(repeats):
            inst = random_instance(rng, n)
            oracle = ValueOracle.from_quadratic(random_quadratic(rng, n))
            z = random_hull_point(rng, inst, terms=3)
            started = time.perf_counter()
            separate(inst, oracle, z, 0.0, check_membership=False)
            samples.append(time.perf_counter() - started)
        medians[n] = float(np.median(samples))
        logger.info(f"|V|={n}: median separation time {medians[n]:.4f}s over {repeats} runs")
    return medians


def loglog_slope(medians: Dict[int, float]) -> float:
    """Least-squares exponent of time against size."""
    sizes = np.array(sorted(medians), dtype=float)
    times = np.array([medians[int(n)] for n in sizes])
    slope, _ = np.polyfit(np.log(sizes), np.log(times), 1)
    return float(slope)
