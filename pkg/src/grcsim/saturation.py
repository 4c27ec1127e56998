"""Input constraints written as a state-dependent gain and offset.

An out-of-range command u is replaced by ``s1*u + s2`` where
``s1 = 1/(|u| + 1)`` and ``s2`` moves the result onto the violated bound,
so the applied value is exactly the clamp of u.  Inside the limits
``s1 = 1`` and ``s2 = 0``.  Boundary values count as interior.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .types import SaturationLimits


@dataclass(frozen=True)
class SaturationSplit:
    s1: float
    s2: float
    value: float


def saturate(u: float, limits: SaturationLimits) -> SaturationSplit:
    u = float(u)
    if not math.isfinite(u):
        raise ValueError("non-finite control input")
    if limits.u_min <= u <= limits.u_max:
        return SaturationSplit(1.0, 0.0, u)
    s1 = 1.0 / (abs(u) + 1.0)
    shrink = u / (abs(u) + 1.0)
    if u > limits.u_max:
        return SaturationSplit(s1, limits.u_max - shrink, limits.u_max)
    return SaturationSplit(s1, limits.u_min - shrink, limits.u_min)


def saturate_array(u, u_min: float, u_max: float):
    """Vectorized :func:`saturate`; returns ``(s1, s2, value)`` arrays."""
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("non-finite control input")
    mag = np.abs(u) + 1.0
    above = u > u_max
    below = u < u_min
    outside = above | below
    s1 = np.where(outside, 1.0 / mag, 1.0)
    shrink = u / mag
    s2 = np.where(above, u_max - shrink, np.where(below, u_min - shrink, 0.0))
    value = np.where(above, u_max, np.where(below, u_min, u))
    return s1, s2, value


def sign_select(u: float) -> float:
    """Valve-port selector: 1 for u >= 0, else 0."""
    return 1.0 if u >= 0 else 0.0
