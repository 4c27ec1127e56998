import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from grcsim.saturation import saturate, saturate_array, sign_select
from grcsim.types import SaturationLimits


def test_interior_passes_through():
    s = saturate(0.5, SaturationLimits(-1, 1))
    assert (s.s1, s.s2, s.value) == (1.0, 0.0, 0.5)


def test_upper_branch():
    s = saturate(3.0, SaturationLimits(-2, 2))
    assert s.s1 == pytest.approx(0.25)
    assert s.s2 == pytest.approx(1.25)
    assert s.value == 2.0


def test_lower_branch():
    s = saturate(-5.0, SaturationLimits(-2, 2))
    assert s.s1 == pytest.approx(1 / 6)
    assert s.s2 == pytest.approx(-7 / 6)
    assert s.value == -2.0


def test_boundary_counts_as_interior():
    lim = SaturationLimits(-2, 2)
    for u in (-2.0, 2.0):
        s = saturate(u, lim)
        assert (s.s1, s.s2, s.value) == (1.0, 0.0, u)


def test_non_finite_input_rejected():
    with pytest.raises(ValueError, match="non-finite control input"):
        saturate(float("nan"), SaturationLimits(-1, 1))
    with pytest.raises(ValueError, match="non-finite control input"):
        saturate_array([0.0, float("inf")], -1, 1)


@pytest.mark.parametrize("u, expected", [(0.0, 1.0), (-0.3, 0.0), (7.2, 1.0)])
def test_sign_select(u, expected):
    assert sign_select(u) == expected


def test_continuity_at_bound():
    lim = SaturationLimits(-1, 1)
    h = 1e-8
    assert abs(saturate(1 + h, lim).value - saturate(1 - h, lim).value) <= 2 * h


bounds = st.floats(-1e6, 1e6, allow_nan=False)
inputs = st.floats(-1e9, 1e9, allow_nan=False)


@given(inputs, bounds, bounds)
def test_clamp_equivalence_and_identity(u, a, b):
    assume(a < b)
    s = saturate(u, SaturationLimits(a, b))
    assert s.value == min(max(u, a), b)
    scale = max(abs(s.s1 * u), abs(s.s2), abs(s.value), 1e-300)
    assert abs(s.s1 * u + s.s2 - s.value) <= 4 * math.ulp(scale)
    assert 0 < s.s1 <= 1
    if a <= u <= b:
        assert (s.s1, s.s2) == (1.0, 0.0)


@given(st.lists(inputs, min_size=1, max_size=50), bounds, bounds)
def test_array_matches_scalar(us, a, b):
    assume(a < b)
    s1, s2, value = saturate_array(np.array(us), a, b)
    for i, u in enumerate(us):
        s = saturate(u, SaturationLimits(a, b))
        assert (s1[i], s2[i], value[i]) == (s.s1, s.s2, s.value)


@given(st.floats(-1e9, 1e9, allow_nan=False).filter(lambda u: u != 0))
def test_sign_select_complement(u):
    assert sign_select(u) + sign_select(-u) == 1.0
