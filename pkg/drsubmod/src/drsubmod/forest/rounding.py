"""
Floor and ceiling under the convention used throughout the package:
for an integral value alpha, floor(alpha) = alpha - 1 and ceil(alpha) = alpha.
Code elsewhere must go through these helpers instead of calling numpy/math
floor and ceil on values that may be integral.
"""
import math

import numpy as np

from ..config.settings import settings


def is_integral(value: float, tol: float = None) -> bool:
    if tol is None:
        tol = settings.INTEGRALITY_TOL
    if not np.isfinite(value):
        return False
    return abs(value - round(value)) <= tol


def floor_bound(value: float) -> float:
    """Strict floor: the largest integer strictly below an integral value."""
    if is_integral(value):
        return float(round(value)) - 1.0
    return float(math.floor(value))


def ceil_bound(value: float) -> float:
    """Ceiling that leaves integral values (including 0) unchanged."""
    if is_integral(value):
        return float(round(value))
    return float(math.ceil(value))


def round_down_to_integer(value: float) -> float:
    """Largest integer not exceeding value; integral inputs snap to themselves."""
    if not np.isfinite(value):
        return value
    if is_integral(value):
        return float(round(value))
    return float(math.floor(value))


def snap(value: float) -> float:
    """Snap near-integral finite values to the exact integer."""
    if np.isfinite(value) and is_integral(value):
        return float(round(value))
    return float(value)


def fractional_part(value: float) -> float:
    """value - floor_bound(value) for a non-integral value."""
    return value - floor_bound(value)
