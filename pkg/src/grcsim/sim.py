"""Closed-loop simulation, run metrics and convergence-envelope fitting.

Controls are held (zero-order hold) over each control tick while the
plant is integrated with ``substeps`` fixed Euler or RK4 steps.  Runs are
batched over disturbance seeds: one batch member per seed, all sharing the
configuration.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar, nnls

from . import grc
from .chain import SubsystemChain, build_chain
from .plants import kernels
from .plants.disturbance import DisturbanceProfile, DisturbanceSource
from .plants.models import PlantModel, pmsm_velocity_terms
from .saturation import saturate
from .types import CSV_COLUMNS, COLUMN_INDEX, GainSet, PlantFamily, SaturationLimits, Telemetry

log = logging.getLogger(__name__)

METHODS = {"euler": kernels.EULER, "rk4": kernels.RK4}


class DivergenceError(FloatingPointError):
    pass


@dataclass(frozen=True)
class PidGains:
    k_p: float
    k_i: float
    k_d: float
    clamp: float = math.inf


@dataclass(frozen=True)
class SimConfig:
    family: PlantFamily
    params: object
    gains: GainSet
    limits: tuple[SaturationLimits, ...]
    trajectory: object
    duration: float
    dt: float = 0.001
    substeps: int = 10
    integrator: str = "rk4"
    disturbance: DisturbanceProfile = field(default_factory=DisturbanceProfile)
    seed: int = 0
    controller: str = "grc"
    pid: PidGains | None = None
    saturate_u1: bool | None = None
    chi0: tuple[float, ...] | float = 0.0
    x0: tuple[float, float] = (0.0, 0.0)
    band: float = 1e-3
    rmse_start: float = 0.0
    strict_pressure: bool = False
    name: str = "custom"
    tracked: str = "position"

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be > 0")
        if not self.duration > 0:
            raise ValueError("duration must be > 0")
        if int(self.substeps) != self.substeps or self.substeps < 1:
            raise ValueError("substeps must be an integer >= 1")
        if self.integrator not in METHODS:
            raise ValueError(f"integrator must be one of {sorted(METHODS)}")
        if self.controller not in ("grc", "pid"):
            raise ValueError("controller must be 'grc' or 'pid'")
        if self.tracked not in ("position", "velocity"):
            raise ValueError("tracked must be 'position' or 'velocity'")
        if self.controller == "pid" and self.pid is None:
            raise ValueError("pid controller selected but no PID gains given")
        if self.gains.n != PlantModel(self.family, self.params).n:
            raise ValueError("gain set size does not match the plant's subsystem count")
        grc.check_adaptive_step(self.gains, self.dt)
        build_chain(self.family, self.limits, self.saturate_u1)

    @property
    def ticks(self) -> int:
        return int(round(self.duration / self.dt))

    def chain(self) -> SubsystemChain:
        return build_chain(self.family, self.limits, self.saturate_u1)

    def plant(self) -> PlantModel:
        return PlantModel(self.family, self.params)


@dataclass(frozen=True)
class RunMetrics:
    rmse_position: float
    rmse_velocity: float
    max_abs_error: float
    settling_time: float
    settled: bool
    control_saturation_fraction: float
    final_error: float
    diverged: bool = False

    def as_dict(self) -> dict:
        return {
            "rmse_position": self.rmse_position,
            "rmse_velocity": self.rmse_velocity,
            "max_abs_error": self.max_abs_error,
            "settling_time": self.settling_time,
            "settled": self.settled,
            "control_saturation_fraction": self.control_saturation_fraction,
            "final_error": self.final_error,
            "diverged": self.diverged,
        }


@dataclass(frozen=True)
class BoundFit:
    A: float
    iota: float
    B: float
    fit_residual: float


def integrate_step(f, state, inputs, dt: float, method: str = "rk4"):
    """One explicit Euler or classical RK4 step of ``xdot = f(x, inputs)``."""
    if not dt > 0:
        raise ValueError("dt must be > 0")
    if method not in METHODS:
        raise ValueError(f"integrator must be one of {sorted(METHODS)}")
    x = np.asarray(state, dtype=float)

    def rhs(x_):
        return np.asarray(f(x_, inputs), dtype=float)

    k1 = rhs(x)
    if method == "euler":
        out = x + dt * k1
    else:
        k2 = rhs(x + 0.5 * dt * k1)
        k3 = rhs(x + 0.5 * dt * k2)
        k4 = rhs(x + dt * k3)
        out = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(out)):
        raise DivergenceError("non-finite state after integration step")
    return out


def _pid_tick(chain: SubsystemChain, state: grc.PidState, x, sample, dt):
    x_d, v_d, a_d = sample
    B = x.shape[0]
    raw, state = grc.pid_tick(state, x_d - x[:, 0], dt)
    raw = np.broadcast_to(raw, (B,)).astype(float)
    j = chain.physical_inputs[0]
    lim = chain.limits_for(j)
    applied = np.clip(raw, lim.u_min, lim.u_max)
    inputs = np.zeros((B, len(chain.physical_inputs)))
    inputs[:, 0] = applied
    u = np.zeros((B, 4))
    u[:, j] = raw
    su = np.zeros((B, 3))
    su[:, j - 1] = applied
    xd = np.zeros((B, 4))
    xd[:, 0], xd[:, 1] = x_d, v_d
    e = np.zeros((B, 4))
    e[:, 0] = x[:, 0] - x_d
    e[:, 1] = x[:, 1] - v_d
    res = grc.TickResult(inputs, xd, e, e.copy(), u, su, np.zeros((B, 4)), applied != raw)
    return res, state


# states beyond this magnitude are treated as diverged; NaN also fails the test
DIVERGENCE_LIMIT = 1e15


def simulate(config: SimConfig, seeds=None, dense_hook=None) -> list[Telemetry]:
    """Run the closed loop once per seed; returns one Telemetry per seed."""
    seeds = [config.seed] if seeds is None else list(seeds)
    B = len(seeds)
    chain = config.chain()
    plant = config.plant()
    n = chain.n
    dt = config.dt
    N = config.ticks
    h = dt / config.substeps
    method = METHODS[config.integrator]
    dist = DisturbanceSource(config.disturbance, seeds)
    traj = config.trajectory

    X = np.tile(plant.rest_state(*config.x0), (B, 1))
    if config.controller == "grc":
        cstate = grc.GrcState.initial(config.gains, B, config.chi0)
    else:
        g = config.pid
        cstate = grc.PidState(g.k_p, g.k_i, g.k_d, g.clamp, np.zeros(B), None)

    rows = np.zeros((B, N + 1, len(CSV_COLUMNS)))
    alive = np.ones(B, dtype=bool)
    stop = np.full(B, N + 1)
    clip_ticks = np.zeros(B, dtype=int)
    for k in range(N + 1):
        t = k * dt
        x = plant.measure(X)
        sample = traj.sample(t)
        D = dist(t)
        if config.controller == "grc":
            res, cstate = grc.grc_tick(chain, cstate, x, sample, dt)
        else:
            res, cstate = _pid_tick(chain, cstate, x, sample, dt)
        r = rows[:, k]
        r[:, 0] = t
        r[:, 1:1 + n] = x
        r[:, 5:9] = res.xd
        r[:, 9:13] = res.e
        r[:, 13:17] = res.z
        r[:, 17:21] = res.u
        r[:, 21:24] = res.su
        r[:, 24:28] = res.chi
        r[:, 28:32] = D
        if k == N:
            break
        clip_ticks += plant.pressure_violation(X)
        if dense_hook is not None:
            dense_hook(k, t, X, res, cstate, D)
        try:
            X = kernels.advance_batch(plant.kernel, X, res.inputs, D, plant.vector, h, config.substeps,
                                      method, config.strict_pressure)
        except ValueError:
            # strict pressure mode: find the offending members, stop only those
            X = _advance_each(plant, X, res.inputs, D, h, config.substeps, method)
        bad = ~np.all(np.abs(X) < DIVERGENCE_LIMIT, axis=1) & alive
        if np.any(bad):
            stop[bad] = k + 1
            alive &= ~bad
            log.warning("run diverged at tick %d (seeds %s)", k + 1, [seeds[i] for i in np.flatnonzero(bad)])
            X[bad] = plant.rest_state()
            if not np.any(alive):
                break

    out = []
    for b in range(B):
        tel = Telemetry(rows[b, :stop[b]], n_subsystems=n)
        tel.diverged = bool(stop[b] <= N)
        tel.diverged_at = int(stop[b]) if tel.diverged else None
        tel.flags = {"pressure_clip_ticks": int(clip_ticks[b]), "physical_inputs": chain.physical_inputs,
                     "seed": seeds[b]}
        out.append(tel)
    return out


def _advance_each(plant, X, U, D, h, substeps, method):
    out = np.empty_like(X)
    for b in range(X.shape[0]):
        try:
            out[b] = kernels.advance(plant.kernel, X[b], U[b], D[b], plant.vector, h, substeps, method, True)
        except ValueError:
            out[b] = np.nan
    return out


def compute_metrics(telemetry: Telemetry, band: float = 1e-3, rmse_start: float = 0.0) -> RunMetrics:
    if len(telemetry) == 0:
        raise ValueError("empty telemetry")
    t = telemetry.col("t")
    e1 = np.abs(telemetry.col("e1"))
    e2 = np.abs(telemetry.col("e2"))
    late = t >= rmse_start
    if not np.any(late):
        late = t == t[-1]
    rmse = float(np.sqrt(np.mean(e1[late] ** 2)))
    rmse_v = float(np.sqrt(np.mean(e2[late] ** 2)))
    outside = np.flatnonzero(e1 > band)
    if outside.size == 0:
        settling, settled = float(t[0]), True
    elif outside[-1] == len(e1) - 1:
        settling, settled = math.nan, False
    else:
        settling, settled = float(t[outside[-1] + 1]), True
    physical = telemetry.flags.get("physical_inputs", ()) if telemetry.flags else ()
    if physical:
        clipped = np.zeros(len(telemetry), dtype=bool)
        for j in physical:
            clipped |= telemetry.col(f"su{j}") != telemetry.col(f"u{j}")
        sat_frac = float(np.mean(clipped))
    else:
        sat_frac = 0.0
    return RunMetrics(
        rmse_position=rmse,
        rmse_velocity=rmse_v,
        max_abs_error=float(np.max(e1)),
        settling_time=settling,
        settled=settled,
        control_saturation_fraction=sat_frac,
        final_error=float(e1[-1]),
        diverged=bool(telemetry.diverged),
    )


def run_closed_loop(config: SimConfig):
    """Single run at ``config.seed``; returns (telemetry, metrics)."""
    tel = simulate(config)[0]
    return tel, compute_metrics(tel, config.band, config.rmse_start)


def run_batch(config: SimConfig, seeds):
    return [(tel, compute_metrics(tel, config.band, config.rmse_start)) for tel in simulate(config, seeds)]


def error_norm_sq(telemetry: Telemetry) -> np.ndarray:
    z = telemetry.z_matrix()
    return np.sum(z * z, axis=1)


def fit_envelope(t, series) -> BoundFit:
    """Fit ``A exp(-iota (t - t0)) + B`` (A, iota, B >= 0) to the upper envelope of ``series``.

    The envelope is the running maximum taken backwards in time, i.e. the
    smallest non-increasing curve lying on or above the data.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(series, dtype=float)
    if y.size < 100:
        raise ValueError("need at least 100 samples to fit an envelope")
    env = np.maximum.accumulate(y[::-1])[::-1]
    scale = float(env.max())
    if scale == 0.0:
        return BoundFit(0.0, 0.0, 0.0, 0.0)
    s = t - t[0]
    span = float(s[-1]) if s[-1] > 0 else 1.0
    target = env / scale

    def solve(log_iota):
        design = np.column_stack([np.exp(-math.exp(log_iota) * s), np.ones_like(s)])
        coef, rnorm = nnls(design, target)
        return coef, rnorm

    lo, hi = math.log(1e-3 / span), math.log(len(s) / span)
    grid = np.linspace(lo, hi, 121)
    costs = [solve(g)[1] for g in grid]
    i = int(np.argmin(costs))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    best = minimize_scalar(lambda g: solve(g)[1], bounds=(a, b), method="bounded",
                           options={"xatol": 1e-10})
    log_iota = best.x if best.fun <= costs[i] else grid[i]
    (A, B), rnorm = solve(log_iota)
    iota = math.exp(log_iota)
    if A <= 1e-12:
        A, iota = 0.0, 0.0
    return BoundFit(A * scale, iota, B * scale, rnorm * scale / math.sqrt(len(s)))


def fit_convergence_bound(telemetry: Telemetry) -> BoundFit:
    """Envelope fit of the squared transform norm sum_j z_j^2 along a run."""
    return fit_envelope(telemetry.col("t"), error_norm_sq(telemetry))


@dataclass(frozen=True)
class IdentityCheck:
    t: np.ndarray
    fd: np.ndarray
    rhs: np.ndarray

    @property
    def relative_error(self) -> float:
        return float(np.max(np.abs(self.fd - self.rhs)) / np.max(np.abs(self.rhs)))


def z2_identity_check(config: SimConfig) -> IdentityCheck:
    """Compare a finite-difference z_2 rate with its assembled right side.

    Along a PMSM run, z_2(t) = x_2 - xdot_d - u_0(t) is evaluated at every
    integration substep and differentiated by central differences inside
    each tick.  The right side is alpha_2 (s11 u_1 + s21) + F*_2 + D*_2
    built from the simulated plant's own velocity-row terms, where
    F*_2 = alpha_2 (x_3 - Sat(u_1)) + F_2(x) - du_0/dt and
    D*_2 = D_2 - xddot_d.
    """
    if config.family is not PlantFamily.PMSM_EDA:
        raise ValueError("the z_2 identity check is implemented for the PMSM family")
    if config.controller != "grc":
        raise ValueError("the z_2 identity check needs the GRC controller")
    plant = config.plant()
    chain = config.chain()
    h = config.dt / config.substeps
    method = METHODS[config.integrator]
    g = config.gains
    ts, fds, rhss = [], [], []

    def hook(k, t0, X, res, cstate, D):
        states = kernels.advance_dense(plant.kernel, X[0], res.inputs[0], D[0], plant.vector, h,
                                       config.substeps, method, config.strict_pressure)
        times = t0 + h * np.arange(config.substeps + 1)
        chi0 = res.chi[0, 0]
        gain0 = 0.5 * (g.k[0] + g.epsilon[0] * chi0)
        samples = np.array([config.trajectory.sample(tt) for tt in times])
        x_d, v_d, a_d = samples[:, 0], samples[:, 1], samples[:, 2]
        u0 = -gain0 * (states[:, 0] - x_d)
        z2 = states[:, 1] - v_d - u0
        fd = (z2[2:] - z2[:-2]) / (2 * h)
        inner = states[1:-1]
        u1 = res.u[0, 1]
        if chain.saturate_u1:
            split = saturate(u1, chain.limits[0])
            s11, s21, sat_u1 = split.s1, split.s2, split.value
        else:
            s11, s21, sat_u1 = 1.0, 0.0, u1
        alpha2, F2_plant, D2 = pmsm_velocity_terms(inner, D[0, 1], config.params)
        du0 = -gain0 * (inner[:, 1] + D[0, 0] - v_d[1:-1])
        F2 = alpha2 * (inner[:, 2] - sat_u1) + F2_plant
        F2_star = F2 - du0
        D2_star = D2 - a_d[1:-1]
        rhs = alpha2 * (s11 * u1 + s21) + F2_star + D2_star
        ts.append(times[1:-1])
        fds.append(fd)
        rhss.append(rhs)

    simulate(config, dense_hook=hook)
    return IdentityCheck(np.concatenate(ts), np.concatenate(fds), np.concatenate(rhss))
