"""Compiled state-derivative kernels and the fixed-step integrators.

Kernel signature: ``f(x, u, d, p, strict) -> dx`` with internal SI state x,
physical inputs u, disturbance channels d (4 entries) and the flattened
parameter vector p.  Channel 2 of d is the mechanical load input of the
electric and hydraulic families (load force/torque, with the sign of the
family's motion equation); every other channel adds directly to the rate
of the matching state.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

EULER = 0
RK4 = 1


@njit(cache=True)
def _root(r, strict):
    if r < 0.0:
        if strict:
            raise ValueError("pressure bound violated")
        return 0.0
    return math.sqrt(r)


@njit(cache=True)
def universal_motor(x, u, d, p, strict):
    R_a, R_f, L_a, L_f, phi_m, J_m, b_m, tau_fs, omega_ref = p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7], p[8]
    omega = x[1]
    i = x[2]
    emf = omega * phi_m
    torque = i * phi_m
    dx = np.empty(3)
    dx[0] = omega + d[0]
    dx[1] = (torque - b_m * omega - d[1] - tau_fs * math.tanh(omega / omega_ref)) / J_m
    dx[2] = (u[0] - (R_a + R_f) * i - emf) / (L_a + L_f) + d[2]
    return dx


@njit(cache=True)
def pmsm_eda(x, u, d, p, strict):
    R_s, L_d, L_q, phi_m, n_p, J_eq, b_eq, k_eq, f_eq, ratio = p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7], p[8], p[9]
    pos = x[0]
    vel = x[1]
    i_q = x[2]
    i_d = x[3]
    w = n_p * ratio * vel
    dx = np.empty(4)
    dx[0] = vel + d[0]
    dx[1] = (1.5 * n_p * i_q * phi_m - b_eq * vel - k_eq * pos - f_eq * d[1]) / J_eq
    dx[2] = (-R_s * i_q - w * L_d * i_d - w * phi_m + u[0]) / L_q + d[2]
    dx[3] = (-R_s * i_d + w * L_q * i_q + u[1]) / L_d + d[3]
    return dx


@njit(cache=True)
def hda_flows(u, P1, P2, k_u, P_s, P_r, strict):
    if u == 0.0:
        return 0.0, 0.0
    if u > 0.0:
        return k_u * u * _root(P_s - P1, strict), k_u * u * _root(P2 - P_r, strict)
    return k_u * u * _root(P1 - P_r, strict), k_u * u * _root(P_s - P2, strict)


@njit(cache=True)
def hda_cylinder(x, u, d, p, strict):
    V_1, V_2, beta_e, A_h, C_t, k_u, P_s, P_r = p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7]
    J_h, D_h, b_h, A_f, v_ref = p[8], p[9], p[10], p[11], p[12]
    vel = x[1]
    P1 = x[2]
    P2 = x[3]
    P_l = P1 - P2
    Q1, Q2 = hda_flows(u[0], P1, P2, k_u, P_s, P_r, strict)
    dx = np.empty(4)
    dx[0] = vel + d[0]
    dx[1] = (P_l * D_h - b_h * vel - A_f * math.tanh(vel / v_ref) + d[1]) / J_h
    dx[2] = beta_e / V_1 * (-A_h * vel - C_t * P_l + Q1) + 0.5 * d[2]
    dx[3] = beta_e / V_2 * (A_h * vel + C_t * P_l - Q2) - 0.5 * d[2]
    return dx


@njit(cache=True)
def hda_motor(x, u, d, p, strict):
    tau_v, K_v, C_d, rho, V, beta_e = p[0], p[2], p[3], p[4], p[5], p[6]
    D_eh, C_t, J_eh, b_eh, P_s = p[7], p[8], p[9], p[10], p[11]
    omega = x[1]
    P_l = x[2]
    wxv = x[3]
    sgn = 1.0 if wxv > 0.0 else (-1.0 if wxv < 0.0 else 0.0)
    Q = C_d * wxv * _root((P_s - sgn * P_l) / rho, strict)
    dx = np.empty(4)
    dx[0] = omega + d[0]
    dx[1] = (P_l * D_eh - b_eh * omega + d[1]) / J_eh
    dx[2] = 2.0 * beta_e / V * (Q - D_eh * omega - C_t * P_l) + d[2]
    dx[3] = (K_v * u[0] - wxv) / tau_v + d[3]
    return dx


@njit(cache=True)
def pda_linearized(x, u, d, p, strict):
    a_1, a_2, a_3, b, delta_u, dist = p[0], p[1], p[2], p[3], p[4], p[5]
    dx = np.empty(3)
    dx[0] = x[1] + d[0]
    dx[1] = x[2] + d[1]
    dx[2] = a_1 * x[0] + a_2 * x[1] + a_3 * x[2] + b * u[0] + b * delta_u + dist + d[2]
    return dx


UNIVERSAL_MOTOR = 0
PMSM = 1
HDA_CYLINDER = 2
HDA_MOTOR = 3
PDA = 4


@njit(cache=True)
def derivative(kind, x, u, d, p, strict):
    """Dispatch on the family code; keeps the integrators cacheable."""
    if kind == UNIVERSAL_MOTOR:
        return universal_motor(x, u, d, p, strict)
    if kind == PMSM:
        return pmsm_eda(x, u, d, p, strict)
    if kind == HDA_CYLINDER:
        return hda_cylinder(x, u, d, p, strict)
    if kind == HDA_MOTOR:
        return hda_motor(x, u, d, p, strict)
    return pda_linearized(x, u, d, p, strict)


@njit(cache=True)
def step(kind, x, u, d, p, h, method, strict):
    k1 = derivative(kind, x, u, d, p, strict)
    if method == EULER:
        return x + h * k1
    k2 = derivative(kind, x + 0.5 * h * k1, u, d, p, strict)
    k3 = derivative(kind, x + 0.5 * h * k2, u, d, p, strict)
    k4 = derivative(kind, x + h * k3, u, d, p, strict)
    return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


@njit(cache=True)
def advance(kind, x, u, d, p, h, substeps, method, strict):
    """Integrate over ``substeps`` steps of size h with inputs held."""
    for _ in range(substeps):
        x = step(kind, x, u, d, p, h, method, strict)
    return x


@njit(cache=True)
def advance_batch(kind, X, U, D, p, h, substeps, method, strict):
    out = np.empty_like(X)
    for b in range(X.shape[0]):
        out[b] = advance(kind, X[b], U[b], D[b], p, h, substeps, method, strict)
    return out


@njit(cache=True)
def advance_dense(kind, x, u, d, p, h, substeps, method, strict):
    """Like :func:`advance` but returns every intermediate state."""
    out = np.empty((substeps + 1, x.shape[0]))
    out[0] = x
    for s in range(substeps):
        x = step(kind, x, u, d, p, h, method, strict)
        out[s + 1] = x
    return out
