"""Baseline PID tuning: relay experiment, Ziegler-Nichols rule, fixed detune.

The procedure is deterministic so the gains stored in the presets can be
regenerated and checked:

1. Close a relay loop (``u = +-h`` on the position error) around the
   nominal plant, driving the same physical input the PID will drive.
2. After the transient, read the limit-cycle period T_u and the position
   amplitude a; the describing-function estimate of the ultimate gain is
   K_u = 4 h / (pi a).
3. Classic Ziegler-Nichols PID: k_p = 0.6 K_u, k_i = 1.2 K_u / T_u,
   k_d = 0.075 K_u T_u.
4. Detune every gain by ``DETUNE`` (ZN settings are known to be too
   aggressive) and clamp the integral so that k_i * integral alone cannot
   exceed the input limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import build_chain
from .plants import kernels
from .plants.models import PlantModel
from .sim import METHODS, PidGains
from .types import PlantFamily

DETUNE = 0.5


@dataclass(frozen=True)
class RelayResult:
    ultimate_gain: float
    ultimate_period: float
    amplitude: float
    cycles: int


def relay_experiment(family: PlantFamily, params, limits, setpoint: float, relay: float,
                     duration: float = 20.0, dt: float = 0.001, substeps: int = 10,
                     integrator: str = "rk4") -> RelayResult:
    """Relay feedback on the position error; the last half of the run is analysed."""
    if not relay > 0:
        raise ValueError("relay amplitude must be > 0")
    plant = PlantModel(family, params)
    chain = build_chain(family, limits)
    lim = chain.limits_for(chain.physical_inputs[0])
    h_relay = min(relay, lim.u_max, -lim.u_min)
    n_ticks = int(round(duration / dt))
    x = plant.rest_state()
    u = np.zeros(plant.n_inputs)
    d = np.zeros(4)
    pos = np.empty(n_ticks)
    for k in range(n_ticks):
        pos[k] = plant.measure(x)[0]
        u[0] = h_relay if setpoint - pos[k] >= 0 else -h_relay
        x = kernels.advance(plant.kernel, x, u, d, plant.vector, dt / substeps, substeps, METHODS[integrator], False)
        if not np.all(np.isfinite(x)):
            raise FloatingPointError("relay experiment diverged")

    tail = pos[n_ticks // 2:] - setpoint
    up = np.flatnonzero((tail[:-1] < 0) & (tail[1:] >= 0))
    if up.size < 3:
        raise RuntimeError("relay experiment produced no sustained oscillation")
    period = float(np.mean(np.diff(up))) * dt
    seg = tail[up[0]:up[-1]]
    amplitude = 0.5 * float(seg.max() - seg.min())
    k_u = 4.0 * h_relay / (math.pi * amplitude)
    return RelayResult(k_u, period, amplitude, int(up.size - 1))


def ziegler_nichols(k_u: float, t_u: float, detune: float = DETUNE, u_limit: float = math.inf) -> PidGains:
    k_p = 0.6 * k_u * detune
    k_i = 1.2 * k_u / t_u * detune
    k_d = 0.075 * k_u * t_u * detune
    clamp = u_limit / k_i if math.isfinite(u_limit) else math.inf
    return PidGains(k_p, k_i, k_d, clamp)


def tune_pid(family: PlantFamily, params, limits, setpoint: float, relay: float, **kwargs) -> PidGains:
    chain = build_chain(family, limits)
    lim = chain.limits_for(chain.physical_inputs[0])
    res = relay_experiment(family, params, limits, setpoint, relay, **kwargs)
    return ziegler_nichols(res.ultimate_gain, res.ultimate_period, u_limit=min(lim.u_max, -lim.u_min))
