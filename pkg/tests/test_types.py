import numpy as np
import pytest
from hypothesis import given, strategies as st

from grcsim.plants import PlantModel, default_params
from grcsim.types import (
    CSV_COLUMNS,
    GainSet,
    PlantFamily,
    PlantState,
    SaturationLimits,
    Telemetry,
    TelemetryRecord,
    subsystem_count,
)


@pytest.mark.parametrize("family, n", [
    (PlantFamily.PMSM_EDA, 4),
    (PlantFamily.HDA_CYLINDER, 3),
    (PlantFamily.UNIVERSAL_MOTOR_EDA, 3),
    (PlantFamily.HDA_MOTOR_WITH_VALVE, 4),
    (PlantFamily.PDA_LINEARIZED, 3),
])
def test_subsystem_count(family, n):
    assert subsystem_count(family) == n


@pytest.mark.parametrize("family", list(PlantFamily))
def test_count_matches_exported_state(family):
    plant = PlantModel(family, default_params(family))
    state = plant.plant_state(plant.rest_state())
    assert len(state.x) == subsystem_count(family)


def test_family_parse_accepts_dashes_and_names():
    assert PlantFamily.parse("hda-cylinder") is PlantFamily.HDA_CYLINDER
    assert PlantFamily.parse("PMSM_EDA") is PlantFamily.PMSM_EDA
    with pytest.raises(ValueError):
        PlantFamily.parse("steam_engine")


def test_plant_state_validation():
    with pytest.raises(ValueError):
        PlantState((0.0, 1.0))
    with pytest.raises(ValueError):
        PlantState((0.0, float("nan"), 1.0))


def test_limits_and_gains_validation():
    with pytest.raises(ValueError):
        SaturationLimits(1.0, 1.0)
    with pytest.raises(ValueError, match="gamma > 0"):
        GainSet.uniform(3, 35, 1, -1, 0.01)
    with pytest.raises(ValueError):
        GainSet((1, 2, 3), (1, 1, 1), (1, 1, 1), (1, 1))
    assert GainSet.uniform(4, 35, 1, 0.001, 0.01).n == 4


def test_csv_has_fixed_width_schema():
    assert len(CSV_COLUMNS) == 32
    tel = Telemetry(np.zeros((2, 32)), n_subsystems=3)
    lines = tel.to_csv().split("\n")
    assert lines[0].split(",") == list(CSV_COLUMNS)
    assert all(len(line.split(",")) == 32 for line in lines[1:-1])
    assert tel.present == (True, True, True, False)


def test_negative_zero_prints_as_zero():
    tel = Telemetry(np.full((1, 32), -0.0))
    assert "-" not in tel.to_csv()


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(st.lists(finite, min_size=32, max_size=32))
def test_record_roundtrip_is_bit_exact(values):
    tel = Telemetry(np.array([values]))
    back = Telemetry.from_csv(tel.to_csv())
    # compare bit patterns, except that -0.0 is written as 0.0
    assert np.array_equal(back.data, tel.data + 0.0)
    assert np.array_equal(back.data.view(np.int64), (tel.data + 0.0).view(np.int64))


def test_record_view_and_file_roundtrip(tmp_path):
    data = np.arange(64, dtype=float).reshape(2, 32) / 7.0
    tel = Telemetry(data, n_subsystems=4)
    rec = tel[1]
    assert isinstance(rec, TelemetryRecord)
    assert rec.as_row() == tuple(data[1])
    path = tmp_path / "t.csv"
    tel.write_csv(path)
    assert b"\r" not in path.read_bytes()
    assert np.array_equal(Telemetry.read_csv(path).data, data)


def test_from_csv_rejects_wrong_header():
    with pytest.raises(ValueError):
        Telemetry.from_csv("a,b\n1,2\n")
