"""Desired trajectories.  Every source exposes ``sample(t) -> (x_d, xdot_d, xddot_d)``."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class QuinticSegment:
    """Rest-to-rest quintic from x0 at t0 to xf at t0 + T."""

    x0: float
    xf: float
    T: float
    t0: float = 0.0

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("quintic duration T must be > 0")

    def sample(self, t: float):
        return quintic_sample(self, t)


def quintic_sample(seg: QuinticSegment, t: float):
    tau = (t - seg.t0) / seg.T
    span = seg.xf - seg.x0
    if tau <= 0.0:
        return seg.x0, 0.0, 0.0
    if tau >= 1.0:
        return seg.xf, 0.0, 0.0
    t2 = tau * tau
    t3 = t2 * tau
    s = t3 * (10.0 - 15.0 * tau + 6.0 * t2)
    ds = 30.0 * t2 * (1.0 - 2.0 * tau + t2)
    dds = 60.0 * tau * (1.0 - 3.0 * tau + 2.0 * t2)
    return seg.x0 + span * s, span * ds / seg.T, span * dds / (seg.T * seg.T)


@dataclass(frozen=True)
class VelocityScript:
    """Piecewise-linear velocity through (time, velocity) breakpoints.

    The velocity is held at the first/last breakpoint value outside the
    scripted span; position is the exact integral from t = 0 starting at x0.
    """

    times: tuple[float, ...] = ()
    velocities: tuple[float, ...] = ()
    x0: float = 0.0

    def __post_init__(self):
        if len(self.times) != len(self.velocities):
            raise ValueError("times and velocities must have equal length")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("breakpoint times must be strictly increasing")
        object.__setattr__(self, "times", tuple(float(v) for v in self.times))
        object.__setattr__(self, "velocities", tuple(float(v) for v in self.velocities))

    def sample(self, t: float):
        return velocity_script_sample(self, t)


def _knots(script: VelocityScript):
    ts = list(script.times)
    vs = list(script.velocities)
    if ts[0] > 0.0:
        ts.insert(0, 0.0)
        vs.insert(0, vs[0])
    return ts, vs


def velocity_script_sample(script: VelocityScript, t: float):
    if not script.times:
        return script.x0, 0.0, 0.0
    ts, vs = _knots(script)
    v = float(np.interp(t, ts, vs))
    a = 0.0
    pos = script.x0
    for i in range(len(ts) - 1):
        t_a, t_b = ts[i], ts[i + 1]
        if t <= t_a:
            break
        slope = (vs[i + 1] - vs[i]) / (t_b - t_a)
        if t < t_b:
            a = slope
            pos += 0.5 * (vs[i] + v) * (t - t_a)
            break
        pos += 0.5 * (vs[i] + vs[i + 1]) * (t_b - t_a)
    else:
        pos += vs[-1] * (t - ts[-1])
    return pos, v, a


def load_velocity_script(path: str | Path, x0: float = 0.0) -> VelocityScript:
    """Read a (t, v) CSV; '#' lines are skipped and a non-numeric first row is a header."""
    times, vels = [], []
    seen_row = False
    with open(path, newline="", encoding="utf-8") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or row[0].strip().startswith("#"):
                continue
            first, seen_row = not seen_row, True
            try:
                t, v = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if first:
                    continue
                raise ValueError(f"{path}:{i + 1}: expected 't,v' row, got {row!r}") from None
            times.append(t)
            vels.append(v)
    return VelocityScript(tuple(times), tuple(vels), x0)


@dataclass(frozen=True)
class StepReference:
    """Position step from x0 to value at t_on; derivatives are zero."""

    value: float
    t_on: float = 0.0
    x0: float = 0.0

    def sample(self, t: float):
        return (self.value if t >= self.t_on else self.x0), 0.0, 0.0
