import dataclasses

import numpy as np
import pytest
from hypothesis import given, strategies as st

from grcsim.kvfile import ConfigError
from grcsim.plants import (
    DisturbanceProfile,
    DisturbanceSource,
    HdaCylinderParams,
    HdaMotorParams,
    PdaParams,
    PlantModel,
    PmsmEdaParams,
    UniversalMotorParams,
    default_params,
    format_params,
    hda_cylinder_derivative,
    hda_cylinder_flows,
    hda_motor_derivative,
    load_params,
    parse_params,
    pda_derivative,
    pmsm_eda_derivative,
    sample_disturbance,
    universal_motor_derivative,
)
from grcsim.plants import kernels
from grcsim.plants.models import params_type
from grcsim.types import PlantFamily


class TestUniversalMotor:
    def test_rest_is_equilibrium(self):
        assert universal_motor_derivative((0, 0, 0), 0.0, 0.0, UniversalMotorParams()) == (0, 0, 0)

    def test_voltage_drives_current(self):
        p = UniversalMotorParams(L_a=0.3, L_f=0.2)
        assert universal_motor_derivative((0, 0, 0), 1.0, 0.0, p) == pytest.approx((0, 0, 2.0))

    def test_current_produces_torque(self):
        p = UniversalMotorParams(phi_m=0.2, J_m=0.1, b_m=0.0, tau_fs=0.0)
        d = universal_motor_derivative((0, 0, 1.0), 0.0, 0.0, p)
        assert d[1] == pytest.approx(2.0)


class TestPmsm:
    def test_rest_is_equilibrium(self):
        assert pmsm_eda_derivative((0, 0, 0, 0), 0, 0, 0, PmsmEdaParams()) == (0, 0, 0, 0)

    def test_q_voltage(self):
        d = pmsm_eda_derivative((0, 0, 0, 0), 1.0, 0.0, 0.0, PmsmEdaParams(L_q=0.01))
        assert d == pytest.approx((0, 0, 100.0, 0))

    def test_thrust_from_q_current(self):
        p = PmsmEdaParams(n_p=3, phi_m=0.1, J_eq=1.0, b_eq=0, k_eq=0)
        assert pmsm_eda_derivative((0, 0, 2.0, 0), 0, 0, 0, p)[1] == pytest.approx(0.9)

    def test_uncertainty_scales_parameters(self):
        p = PmsmEdaParams(L_q=0.01, delta_L_q=0.25)
        assert pmsm_eda_derivative((0, 0, 0, 0), 1.0, 0, 0, p)[2] == pytest.approx(80.0)
        with pytest.raises(ValueError):
            PmsmEdaParams(delta_J=0.8)

    @given(st.floats(-100, 100), st.floats(0.01, 10))
    def test_q_current_rate_increases_with_voltage(self, u, du):
        p = PmsmEdaParams()
        lo = pmsm_eda_derivative((0.0, 0.0, 0.3, 0.0), u, 0, 0, p)[2]
        hi = pmsm_eda_derivative((0.0, 0.0, 0.3, 0.0), u + du, 0, 0, p)[2]
        assert hi > lo


class TestHdaCylinder:
    def test_supply_flow(self):
        p = HdaCylinderParams(k_u=1.0, P_s=10.0, P_r=0.0)
        q1, _ = hda_cylinder_flows(1.0, 6.0, 4.0, p)
        assert q1 == pytest.approx(2.0)

    def test_rest_is_equilibrium(self):
        p = HdaCylinderParams()
        assert hda_cylinder_derivative((0.0, 0.0, 0.0), 0.0, 0.0, p) == (0, 0, 0)

    def test_pressure_force(self):
        p = HdaCylinderParams(D_h=1e-3, b_h=0.0, J_h=100.0)
        d = hda_cylinder_derivative((0.0, 0.0, 1e6), 0.0, 0.0, p)
        assert d[1] == pytest.approx(10.0)

    def test_negative_radicand(self):
        p = HdaCylinderParams()
        over = (0.0, 0.0, p.P_s + 1e5, p.P_s / 2)
        with pytest.raises(ValueError, match="pressure bound violated"):
            hda_cylinder_derivative(over, 1.0, 0.0, p)
        lenient = hda_cylinder_derivative(over, 1.0, 0.0, p, strict=False)
        assert all(np.isfinite(lenient))

    # flows of subnormal commands underflow to 0, so the command stays above 1e-9
    @given(st.floats(-10, 10).filter(lambda u: abs(u) > 1e-9), st.floats(0.01, 0.99), st.floats(0.01, 0.99))
    def test_flow_follows_command_sign(self, u, f1, f2):
        p = HdaCylinderParams()
        q1, q2 = hda_cylinder_flows(u, f1 * p.P_s, f2 * p.P_s, p)
        assert np.sign(q1) == np.sign(u)
        assert np.sign(q2) == np.sign(u)


class TestHdaMotor:
    def test_spool_dynamics(self):
        p = HdaMotorParams(K_v=2.0, tau_v=0.01)
        assert hda_motor_derivative((0, 0, 0, 0), 1.0, 0.0, p)[3] == pytest.approx(200.0)

    def test_rest_is_equilibrium(self):
        assert hda_motor_derivative((0, 0, 0, 0), 0.0, 0.0, HdaMotorParams()) == (0, 0, 0, 0)

    def test_pressure_torque(self):
        p = HdaMotorParams(D_eh=1e-4, b_eh=0.0, J_eh=10.0)
        assert hda_motor_derivative((0, 0, 2e6, 0), 0.0, 0.0, p)[1] == pytest.approx(20.0)


class TestPda:
    def test_rest(self):
        assert pda_derivative((0, 0, 0), 0.0, PdaParams(delta_u=0.0)) == (0, 0, 0)

    def test_input_and_offset(self):
        p = PdaParams(b=2.0, delta_u=0.1)
        assert pda_derivative((0, 0, 0), 1.0, p)[2] == pytest.approx(2.2)

    def test_position_feedback(self):
        p = PdaParams(a_1=-4.0, a_2=0.0, a_3=0.0, delta_u=0.0)
        assert pda_derivative((1.0, 0, 0), 0.0, p)[2] == pytest.approx(-4.0)

    @given(st.lists(st.floats(-10, 10), min_size=8, max_size=8))
    def test_superposition(self, v):
        p = PdaParams(delta_u=0.0)
        xa, ua, xb, ub = np.array(v[:3]), v[3], np.array(v[4:7]), v[7]
        both = np.array(pda_derivative(xa + xb, ua + ub, p))
        split = np.array(pda_derivative(xa, ua, p)) + np.array(pda_derivative(xb, ub, p))
        assert np.allclose(both, split, rtol=1e-12, atol=1e-9)


@pytest.mark.parametrize("family", list(PlantFamily))
def test_model_rest_state_is_equilibrium(family):
    params = default_params(family)
    if family is PlantFamily.PDA_LINEARIZED:
        params = dataclasses.replace(params, delta_u=0.0)
    plant = PlantModel(family, params)
    dx = kernels.derivative(plant.kernel, plant.rest_state(), np.zeros(plant.n_inputs), np.zeros(4),
                            plant.vector, True)
    assert np.all(dx == 0.0)


def test_measure_uses_instrument_units():
    p = HdaCylinderParams()
    plant = PlantModel(PlantFamily.HDA_CYLINDER, p)
    internal = np.array([0.1, 0.2, 6e6, 4e6])
    assert plant.measure(internal) == pytest.approx([0.1, 0.2, 2.0])
    assert plant.plant_state(internal).x == pytest.approx((0.1, 0.2, 2e6))


def test_model_rejects_mismatched_params():
    with pytest.raises(TypeError):
        PlantModel(PlantFamily.PMSM_EDA, PdaParams())


class TestParameterFiles:
    @pytest.mark.parametrize("family", list(PlantFamily))
    def test_shipped_files_pin_defaults(self, family):
        assert default_params(family) == params_type(family)()

    @pytest.mark.parametrize("family", list(PlantFamily))
    def test_format_parse_roundtrip(self, family):
        params = default_params(family)
        assert parse_params(format_params(family, params)) == (family, params)

    def test_unknown_key_has_line_number(self):
        with pytest.raises(ConfigError, match=r"<params>:3: unknown pda_linearized parameter 'zeta'"):
            parse_params("[pda_linearized]\nb = 2\nzeta = 1\n")

    def test_bad_value(self, tmp_path):
        path = tmp_path / "p.cfg"
        path.write_text("[pda_linearized]\nb = two\n")
        with pytest.raises(ConfigError, match="p.cfg:2: b expects a number"):
            load_params(path)

    def test_invariant_violation(self):
        with pytest.raises(ConfigError, match="must be > 0"):
            parse_params("[universal_motor_eda]\nJ_m = -1\n")


class TestDisturbance:
    def test_constant(self):
        d = sample_disturbance(DisturbanceProfile("constant", (5, 5, 5, 5)), 3.7, seed=1)
        assert np.all(d == 5.0)

    def test_step_before_onset(self):
        d = sample_disturbance(DisturbanceProfile("step", (3, 3, 3, 3), t_on=1.0), 0.5)
        assert np.all(d == 0.0)

    def test_sine_peak(self):
        d = sample_disturbance(DisturbanceProfile("sine", (2, 0, 0, 0), frequency=1.0), 0.25)
        assert d[0] == pytest.approx(2.0)

    def test_negative_time(self):
        with pytest.raises(ValueError):
            sample_disturbance(DisturbanceProfile(), -1.0)

    def test_noise_is_bounded_and_seeded(self):
        prof = DisturbanceProfile("noise", (1.0, 2.0, 0.0, 0.5), bandwidth=20.0)
        src = DisturbanceSource(prof, [3, 4])
        t = np.linspace(0, 5, 2001)
        vals = np.array([src(tt) for tt in t])
        assert np.all(np.abs(vals) <= np.array(prof.magnitude) + 1e-15)
        assert not np.array_equal(vals[:, 0], vals[:, 1])
        again = np.array([sample_disturbance(prof, tt, seed=4) for tt in t[:50]])
        assert np.array_equal(again, vals[:50, 1])
