"""Parameter sets for the actuator families.

Every set flattens to a float vector in declaration order (``vector()``),
which is what the compiled derivative kernels consume.  Defaults are
stand-in values for desk-scale simulation; the shipped parameter files in
``plants/data`` are the pinned copies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np


def _check_positive(obj, names):
    for name in names:
        v = getattr(obj, name)
        if not (math.isfinite(v) and v > 0):
            raise ValueError(f"{type(obj).__name__}.{name} must be > 0, got {v}")


def _check_non_negative(obj, names):
    for name in names:
        if getattr(obj, name) < 0:
            raise ValueError(f"{type(obj).__name__}.{name} must be >= 0, got {getattr(obj, name)}")


def _check_finite(obj):
    for f in fields(obj):
        v = getattr(obj, f.name)
        if not math.isfinite(v):
            raise ValueError(f"{type(obj).__name__}.{f.name} is not finite")


class _Vector:
    def vector(self) -> np.ndarray:
        return np.array([float(getattr(self, f.name)) for f in fields(self)], dtype=float)


@dataclass(frozen=True)
class UniversalMotorParams(_Vector):
    """Series-wound motor.  States (theta [rad], omega [rad/s], i [A]); input V [V]."""

    R_a: float = 0.6
    R_f: float = 0.4
    L_a: float = 0.012
    L_f: float = 0.008
    phi_m: float = 0.1
    J_m: float = 0.0125
    b_m: float = 0.002
    tau_fs: float = 0.005
    omega_ref: float = 0.01

    def __post_init__(self):
        _check_finite(self)
        _check_positive(self, ("R_a", "R_f", "L_a", "L_f", "phi_m", "J_m", "omega_ref"))
        _check_non_negative(self, ("b_m", "tau_fs"))


@dataclass(frozen=True)
class PmsmEdaParams(_Vector):
    """PMSM driving a linear stage through a screw.

    States (x_L [m], xdot_L [m/s], i_q [A], i_d [A]); inputs (u_q, u_d) [V].
    ``speed_ratio`` converts load speed to rotor speed for the EMF terms
    (rad per metre; 1 for a rotational stage).  The ``delta_*`` entries are
    fractional parameter errors applied as ``nominal * (1 + delta)``.
    """

    R_s: float = 1.0
    L_d: float = 0.02
    L_q: float = 0.02
    phi_m: float = 0.1
    n_p: float = 4.0
    J_eq: float = 0.075
    b_eq: float = 0.075
    k_eq: float = 0.075
    f_eq: float = 2.5e-6
    speed_ratio: float = 100.0
    delta_R_s: float = 0.0
    delta_L_d: float = 0.0
    delta_L_q: float = 0.0
    delta_phi_m: float = 0.0
    delta_J: float = 0.0

    def __post_init__(self):
        _check_finite(self)
        _check_positive(self, ("R_s", "L_d", "L_q", "phi_m", "n_p", "J_eq", "speed_ratio"))
        _check_non_negative(self, ("b_eq", "k_eq", "f_eq"))
        if self.n_p != int(self.n_p):
            raise ValueError("PmsmEdaParams.n_p must be an integer")
        for name in ("delta_R_s", "delta_L_d", "delta_L_q", "delta_phi_m", "delta_J"):
            if abs(getattr(self, name)) > 0.5:
                raise ValueError(f"|PmsmEdaParams.{name}| must be <= 0.5")

    def effective(self) -> "PmsmEdaParams":
        """Parameters the simulated motor actually has."""
        return PmsmEdaParams(
            R_s=self.R_s * (1 + self.delta_R_s),
            L_d=self.L_d * (1 + self.delta_L_d),
            L_q=self.L_q * (1 + self.delta_L_q),
            phi_m=self.phi_m * (1 + self.delta_phi_m),
            n_p=self.n_p,
            J_eq=self.J_eq * (1 + self.delta_J),
            b_eq=self.b_eq,
            k_eq=self.k_eq,
            f_eq=self.f_eq,
            speed_ratio=self.speed_ratio,
        )


@dataclass(frozen=True)
class HdaCylinderParams(_Vector):
    """Double-rod cylinder behind a fast servo valve.

    Internal states (x_L [m], xdot_L [m/s], P_1 [Pa], P_2 [Pa]); the exported
    third state is P_l = P_1 - P_2 reported in units of ``pressure_unit`` Pa.
    Input u is the valve command [V].
    """

    V_1: float = 1.0e-3
    V_2: float = 1.0e-3
    beta_e: float = 7.0e8
    A_h: float = 1.0e-3
    C_t: float = 1.0e-13
    k_u: float = 1.2e-8
    P_s: float = 1.0e7
    P_r: float = 0.0
    J_h: float = 300.0
    D_h: float = 1.0e-3
    b_h: float = 2000.0
    A_f: float = 50.0
    v_ref: float = 0.01
    pressure_unit: float = 1.0e6

    def __post_init__(self):
        _check_finite(self)
        _check_positive(self, ("V_1", "V_2", "beta_e", "A_h", "k_u", "J_h", "D_h", "v_ref", "pressure_unit"))
        _check_non_negative(self, ("C_t", "b_h", "A_f"))
        if not self.P_s > self.P_r >= 0:
            raise ValueError("HdaCylinderParams requires P_s > P_r >= 0")


@dataclass(frozen=True)
class HdaMotorParams(_Vector):
    """Hydraulic motor with first-order spool dynamics.

    States (theta [rad], omega [rad/s], P_l [Pa], W*x_v [m^2]); exported
    P_l in ``pressure_unit`` Pa and W*x_v in ``opening_unit`` m^2.
    Input u is the valve command [V].
    """

    tau_v: float = 0.01
    W: float = 0.02
    K_v: float = 1.2e-6
    C_d: float = 0.6
    rho: float = 870.0
    V: float = 5.0e-4
    beta_e: float = 7.0e8
    D_eh: float = 1.27e-5
    C_t: float = 1.0e-12
    J_eh: float = 12.7
    b_eh: float = 1.0
    P_s: float = 2.1e7
    pressure_unit: float = 3.0e7
    opening_unit: float = 3.0e-6

    def __post_init__(self):
        _check_finite(self)
        _check_non_negative(self, ("C_t", "b_eh"))
        _check_positive(self, tuple(f.name for f in fields(self) if f.name not in ("C_t", "b_eh")))


@dataclass(frozen=True)
class PdaParams(_Vector):
    """Linearized third-order pneumatic actuator.

    States (x_L [m], xdot_L [m/s], xddot_L [m/s^2]); input u is the valve
    voltage.  ``delta_u`` is the valve neutral offset and ``d`` a constant
    disturbance baseline.
    """

    a_1: float = -50.0
    a_2: float = -400.0
    a_3: float = -10.0
    b: float = 20.0
    delta_u: float = 0.05
    d: float = 0.0

    def __post_init__(self):
        _check_finite(self)
        if self.b == 0:
            raise ValueError("PdaParams.b must be nonzero")
