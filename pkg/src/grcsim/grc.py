"""Model-free generic robust control (GRC) and the PID baseline.

Nothing here reads plant parameters.  The controller sees measured
states, references, its gains and adaptive estimates, and the tick length.

Per tick the cascade runs z_1 -> u_0 -> z_2 -> u_1 -> z_3 -> u_2 (-> z_4 ->
u_3), with

    z_j = x_j - x_jd            (j != 2)
    z_2 = x_2 - x_2d - u_0
    u_v = -(k_v + eps_v * chi_v) / 2 * z_{v+1}   (- z_1 when v = 1)
    dchi_v/dt = -gamma_v * delta_v * chi_v + eps_v * gamma_v / 2 * z_{v+1}^2

and the adaptive estimates advance by one explicit Euler step.  All tick
functions broadcast over a leading batch axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .chain import SubsystemChain, assemble_references
from .saturation import saturate_array
from .types import GainSet, ReferenceFrame


def tracking_transform(chain: SubsystemChain, x, refs: ReferenceFrame, u0):
    """Errors e and transforms z for one tick, each shaped like x."""
    x = np.asarray(x, dtype=float)
    xd = [refs.x1d, refs.x2d, refs.x3d] + ([refs.x4d] if chain.n == 4 else [])
    e = np.stack([x[..., j] - xd[j] for j in range(chain.n)], axis=-1)
    z = e.copy()
    z[..., 1] = e[..., 1] - u0
    return e, z


def grc_control(index: int, gains: GainSet, chi, z):
    """Raw control u_index from z = (z_1, z_2, ...)."""
    u = -0.5 * (gains.k[index] + gains.epsilon[index] * chi) * z[index]
    if index == 1:
        u = u - z[0]
    return u


def adaptive_update(chi, z, dt: float, gamma: float, delta: float, epsilon: float):
    """One explicit Euler step of the adaptive law."""
    return chi + dt * (-gamma * delta * chi + 0.5 * epsilon * gamma * z * z)


def check_adaptive_step(gains: GainSet, dt: float) -> None:
    if dt <= 0:
        raise ValueError("control step dt must be > 0")
    for v in range(gains.n):
        if dt * gains.gamma[v] * gains.delta[v] >= 1.0:
            raise ValueError(f"adaptive step unstable: dt*gamma_{v}*delta_{v} = "
                             f"{dt * gains.gamma[v] * gains.delta[v]:g} must be < 1")


@dataclass
class GrcState:
    gains: GainSet
    chi: np.ndarray

    def __post_init__(self):
        self.chi = np.array(self.chi, dtype=float)
        if self.chi.shape[-1] != self.gains.n:
            raise ValueError("one adaptive estimate per subsystem required")
        if np.any(self.chi < 0):
            raise ValueError("initial adaptive estimates must be >= 0")

    @classmethod
    def initial(cls, gains: GainSet, batch: int = 1, chi0=0.0) -> "GrcState":
        chi = np.broadcast_to(np.asarray(chi0, dtype=float), (batch, gains.n)).copy()
        return cls(gains, chi)


@dataclass
class TickResult:
    """Outputs of one controller tick; every array has a leading batch axis."""

    inputs: np.ndarray  # physical inputs sent to the plant, (B, m)
    xd: np.ndarray      # (B, 4)
    e: np.ndarray       # (B, 4)
    z: np.ndarray       # (B, 4)
    u: np.ndarray       # raw u_0..u_3, (B, 4)
    su: np.ndarray      # values passed on for u_1..u_3, (B, 3)
    chi: np.ndarray     # estimates used this tick, (B, 4)
    saturated: np.ndarray = field(default=None)  # any physical input clipped, (B,)


def _pad(cols, width, batch):
    out = np.zeros((batch, width))
    for j, c in enumerate(cols):
        out[:, j] = c
    return out


def grc_tick(chain: SubsystemChain, state: GrcState, x, trajectory_sample, dt: float):
    """Run the cascade once; returns (TickResult, updated GrcState)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    B = x.shape[0]
    g = state.gains
    chi = state.chi
    n = chain.n
    x_d, v_d, _ = trajectory_sample

    z1 = x[:, 0] - x_d
    u0 = grc_control(0, g, chi[:, 0], (z1,))
    z2 = x[:, 1] - v_d - u0
    u1 = grc_control(1, g, chi[:, 1], (z1, z2))
    passed = [u1]
    clipped = np.zeros(B, dtype=bool)
    if chain.saturated[0]:
        _, _, passed[0] = saturate_array(u1, chain.limits[0].u_min, chain.limits[0].u_max)
        if 1 in chain.physical_inputs:
            clipped |= passed[0] != u1

    # the energy-conversion references need u_1 (and u_2) first, so the
    # remaining transforms are built one subsystem at a time
    z = [z1, z2]
    u = [u0, u1]
    refs = assemble_references(chain, trajectory_sample, (passed[0], 0.0))
    z.append(x[:, 2] - refs.x3d)
    u.append(grc_control(2, g, chi[:, 2], z))
    lim = chain.limits[1]
    _, _, s2 = saturate_array(u[2], lim.u_min, lim.u_max)
    passed.append(s2)
    clipped |= s2 != u[2]
    if n == 4:
        refs = assemble_references(chain, trajectory_sample, (passed[0], passed[1]))
        z.append(x[:, 3] - refs.x4d)
        u.append(grc_control(3, g, chi[:, 3], z))
        lim = chain.limits[2]
        _, _, s3 = saturate_array(u[3], lim.u_min, lim.u_max)
        passed.append(s3)
        clipped |= s3 != u[3]

    xd_cols = [np.full(B, refs.x1d), np.full(B, refs.x2d), refs.x3d] + ([refs.x4d] if n == 4 else [])
    xd = _pad(xd_cols, 4, B)
    zz = _pad(z, 4, B)
    e = zz.copy()
    e[:, 1] = zz[:, 1] + u0
    inputs = np.stack([passed[j - 1] for j in chain.physical_inputs], axis=-1)

    new_chi = np.empty_like(chi)
    for v in range(n):
        new_chi[:, v] = adaptive_update(chi[:, v], z[v], dt, g.gamma[v], g.delta[v], g.epsilon[v])

    result = TickResult(
        inputs=inputs,
        xd=xd,
        e=e,
        z=zz,
        u=_pad(u, 4, B),
        su=_pad(passed, 3, B),
        chi=_pad([chi[:, v] for v in range(n)], 4, B),
        saturated=clipped,
    )
    return result, replace(state, chi=new_chi)


@dataclass
class PidState:
    """Position PID with a clamped integral accumulator."""

    k_p: float
    k_i: float
    k_d: float
    clamp: float = np.inf
    integral: np.ndarray | float = 0.0
    prev_error: np.ndarray | float | None = None

    def __post_init__(self):
        if self.clamp <= 0:
            raise ValueError("PID integral clamp must be > 0")


def pid_tick(state: PidState, e, dt: float):
    """Returns (u, updated state); the first tick has no derivative kick."""
    if dt <= 0:
        raise ValueError("dt must be > 0")
    integral = np.clip(state.integral + e * dt, -state.clamp, state.clamp)
    deriv = 0.0 if state.prev_error is None else (e - state.prev_error) / dt
    u = state.k_p * e + state.k_i * integral + state.k_d * deriv
    if np.ndim(u) == 0:
        u = float(u)
        integral = float(integral)
    return u, replace(state, integral=integral, prev_error=e)
