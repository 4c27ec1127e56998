"""Plant models: public derivative functions and the simulator-facing wrapper.

Unit tables (exported states, as seen by the controller):

================================  =========  ==========  =================  ==============
family                            x1         x2          x3                 x4
================================  =========  ==========  =================  ==============
universal_motor_eda               rad        rad/s       A                  -
pmsm_eda                          m          m/s         A (i_q)            A (i_d)
hda_cylinder                      m          m/s         P_l / pu           -
hda_motor_with_valve              rad        rad/s       P_l / pu           W x_v / ou
pda_linearized                    m          m/s         m/s^2              -
================================  =========  ==========  =================  ==============

pu and ou are the ``pressure_unit`` [Pa] and ``opening_unit`` [m^2] of the
parameter set (cylinder default: pu = 1 MPa; motor defaults: pu = 30 MPa,
a transducer full scale, and ou = 3e-6 m^2).  The derivative functions below work in plain SI.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..types import PlantFamily, PlantState, subsystem_count
from . import kernels
from .params import HdaCylinderParams, HdaMotorParams, PdaParams, PmsmEdaParams, UniversalMotorParams

_NO_DIST = np.zeros(4)


def _state_vector(state, n_expected: Sequence[int]) -> np.ndarray:
    x = state.x if isinstance(state, PlantState) else state
    x = np.asarray(x, dtype=float)
    if x.shape[0] not in n_expected:
        raise ValueError(f"state must have {' or '.join(map(str, n_expected))} entries, got {x.shape[0]}")
    return x


def _finite(*values):
    for v in values:
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite input to plant derivative")


def universal_motor_derivative(state, V_in: float, tau_L: float, params: UniversalMotorParams) -> tuple:
    """(dtheta/dt, domega/dt, di/dt) of the series-wound motor."""
    x = _state_vector(state, (3,))
    _finite(x, V_in, tau_L)
    d = np.array([0.0, tau_L, 0.0, 0.0])
    return tuple(kernels.universal_motor(x, np.array([float(V_in)]), d, params.vector(), True))


def pmsm_eda_derivative(state, u_q: float, u_d: float, f_L: float, params: PmsmEdaParams) -> tuple:
    """(dx/dt, d2x/dt2, di_q/dt, di_d/dt) with uncertainty applied as effective parameters."""
    x = _state_vector(state, (4,))
    _finite(x, u_q, u_d, f_L)
    d = np.array([0.0, f_L, 0.0, 0.0])
    p = params.effective().vector()
    return tuple(kernels.pmsm_eda(x, np.array([float(u_q), float(u_d)]), d, p, True))


def hda_cylinder_flows(u: float, P1: float, P2: float, params: HdaCylinderParams, strict: bool = True):
    """Valve flows (Q_1, Q_2) in m^3/s."""
    return kernels.hda_flows(float(u), float(P1), float(P2), params.k_u, params.P_s, params.P_r, strict)


def hda_cylinder_derivative(state, u: float, D_L: float, params: HdaCylinderParams, strict: bool = True) -> tuple:
    """Cylinder derivative.

    A 4-entry state is the internal (x_L, xdot_L, P_1, P_2) and yields its
    full derivative.  A 3-entry state (x_L, xdot_L, P_l) is expanded with
    symmetric chamber pressures P_1,2 = (P_s + P_r)/2 +- P_l/2 and yields
    (dx_L, ddx_L, dP_l).
    """
    x = _state_vector(state, (3, 4))
    _finite(x, u, D_L)
    d = np.array([0.0, D_L, 0.0, 0.0])
    if x.shape[0] == 4:
        return tuple(kernels.hda_cylinder(x, np.array([float(u)]), d, params.vector(), strict))
    mid = 0.5 * (params.P_s + params.P_r)
    full = np.array([x[0], x[1], mid + 0.5 * x[2], mid - 0.5 * x[2]])
    dx = kernels.hda_cylinder(full, np.array([float(u)]), d, params.vector(), strict)
    return (dx[0], dx[1], dx[2] - dx[3])


def hda_motor_derivative(state, u: float, D_L: float, params: HdaMotorParams, strict: bool = True) -> tuple:
    """(dtheta, domega, dP_l, d(W x_v)) in SI."""
    x = _state_vector(state, (4,))
    _finite(x, u, D_L)
    d = np.array([0.0, D_L, 0.0, 0.0])
    return tuple(kernels.hda_motor(x, np.array([float(u)]), d, params.vector(), strict))


def pda_derivative(state, u: float, params: PdaParams, disturbance: float = 0.0) -> tuple:
    x = _state_vector(state, (3,))
    _finite(x, u, disturbance)
    d = np.array([0.0, 0.0, disturbance, 0.0])
    return tuple(kernels.pda_linearized(x, np.array([float(u)]), d, params.vector(), True))


@dataclass(frozen=True)
class _FamilySpec:
    params_type: type
    kernel: int
    n_internal: int
    n_inputs: int


_FAMILIES = {
    PlantFamily.UNIVERSAL_MOTOR_EDA: _FamilySpec(UniversalMotorParams, kernels.UNIVERSAL_MOTOR, 3, 1),
    PlantFamily.PMSM_EDA: _FamilySpec(PmsmEdaParams, kernels.PMSM, 4, 2),
    PlantFamily.HDA_CYLINDER: _FamilySpec(HdaCylinderParams, kernels.HDA_CYLINDER, 4, 1),
    PlantFamily.HDA_MOTOR_WITH_VALVE: _FamilySpec(HdaMotorParams, kernels.HDA_MOTOR, 4, 1),
    PlantFamily.PDA_LINEARIZED: _FamilySpec(PdaParams, kernels.PDA, 3, 1),
}


def params_type(family: PlantFamily) -> type:
    return _FAMILIES[family].params_type


class PlantModel:
    """Simulator-side view of one plant: internal state, measurement, kernel."""

    def __init__(self, family: PlantFamily, params):
        spec = _FAMILIES[family]
        if not isinstance(params, spec.params_type):
            raise TypeError(f"{family.value} needs {spec.params_type.__name__}, got {type(params).__name__}")
        self.family = family
        self.params = params
        self.kernel = spec.kernel
        self.n = subsystem_count(family)
        self.n_internal = spec.n_internal
        self.n_inputs = spec.n_inputs
        if family is PlantFamily.PMSM_EDA:
            self.vector = params.effective().vector()
        else:
            self.vector = params.vector()
        self.units = self._units()

    def _units(self) -> np.ndarray:
        p = self.params
        if self.family is PlantFamily.HDA_CYLINDER:
            return np.array([1.0, 1.0, p.pressure_unit])
        if self.family is PlantFamily.HDA_MOTOR_WITH_VALVE:
            return np.array([1.0, 1.0, p.pressure_unit, p.opening_unit])
        return np.ones(self.n)

    def rest_state(self, x1: float = 0.0, x2: float = 0.0) -> np.ndarray:
        """Internal state with the mechanism at (x1, x2) and energy states at rest."""
        x = np.zeros(self.n_internal)
        x[0], x[1] = x1, x2
        if self.family is PlantFamily.HDA_CYLINDER:
            mid = 0.5 * (self.params.P_s + self.params.P_r)
            x[2] = x[3] = mid
        return x

    def exported_si(self, internal: np.ndarray) -> np.ndarray:
        """Exported state in SI; works on (n_internal,) or (B, n_internal)."""
        internal = np.asarray(internal, dtype=float)
        if self.family is PlantFamily.HDA_CYLINDER:
            out = internal[..., :3].copy()
            out[..., 2] = internal[..., 2] - internal[..., 3]
            return out
        return internal.copy()

    def measure(self, internal: np.ndarray) -> np.ndarray:
        """Exported state in instrument units, what the controller sees."""
        return self.exported_si(internal) / self.units

    def plant_state(self, internal: np.ndarray, t: float = 0.0) -> PlantState:
        return PlantState(tuple(self.exported_si(internal)), t)

    def pressure_violation(self, internal: np.ndarray) -> np.ndarray:
        """True where a flow radicand would be negative (clipped in lenient mode)."""
        internal = np.atleast_2d(internal)
        p = self.params
        if self.family is PlantFamily.HDA_CYLINDER:
            P1, P2 = internal[:, 2], internal[:, 3]
            return (P1 > p.P_s) | (P1 < p.P_r) | (P2 > p.P_s) | (P2 < p.P_r)
        if self.family is PlantFamily.HDA_MOTOR_WITH_VALVE:
            return np.abs(internal[:, 2]) > p.P_s
        return np.zeros(internal.shape[0], dtype=bool)


def pmsm_velocity_terms(internal: np.ndarray, f_L, params: PmsmEdaParams):
    """Split the velocity row as ``alpha_2 * i_q + F_2(x) + D_2(t)``.

    Uses the effective (perturbed) parameters; only simulator-side
    diagnostics call this, the controller never does.
    """
    p = params.effective()
    internal = np.asarray(internal, dtype=float)
    alpha2 = 1.5 * p.n_p * p.phi_m / p.J_eq
    F2 = (-p.b_eq * internal[..., 1] - p.k_eq * internal[..., 0]) / p.J_eq
    D2 = -p.f_eq * np.asarray(f_L, dtype=float) / p.J_eq
    return alpha2, F2, D2
