"""
Tests for number formatting and result frames
"""

import numpy as np
import pandas as pd
import pytest

from src.core import BoundarySet, GridSpec, Material, TemperatureField, TemperatureUnit
from src.output import format_number, series_frame, snapshots_frame, write_csv
from src.solver import SolverConfig, run


@pytest.mark.parametrize("value,text", [
    (101.0, "101"),
    (0.5, "0.5"),
    (38.333333333, "38.3333"),
    (-0.0, "0"),
    (0.0, "0"),
    (1234567.0, "1234570"),
    (-2.25, "-2.25"),
    (None, ""),
    (float("nan"), ""),
])
def test_format_number(value, text):
    assert format_number(value) == text


@pytest.fixture
def small_result():
    grid = GridSpec((2.0, 1.0), (2, 2))
    field = TemperatureField(grid, [[20.0, 21.0], [22.0, 23.0]])
    config = SolverConfig(dt=1.0, end_time=2.0, snapshot_interval=1.0)
    return run(field, Material(1000.0, 4186.0, 0.6), [], BoundarySet.build(2), config)


def test_snapshots_frame_layout(small_result):
    frame = snapshots_frame(small_result, TemperatureUnit.CELSIUS)
    assert list(frame.columns) == ["t_s", "x_m", "y_m", "T"]
    assert len(frame) == 3 * 4
    np.testing.assert_allclose(frame["x_m"].iloc[:4], [0.5, 0.5, 1.5, 1.5])
    np.testing.assert_allclose(frame["T"].iloc[:4], [20.0, 21.0, 22.0, 23.0])


def test_series_frame_converts_temperatures_only(small_result):
    frame = series_frame(small_result, TemperatureUnit.FAHRENHEIT)
    assert frame["mean"].iloc[0] == pytest.approx(21.5 * 9 / 5 + 32)
    assert frame["energy_J"].iloc[0] == small_result.series["energy_J"].iloc[0]


def test_write_csv_is_fixed_format(tmp_path):
    frame = pd.DataFrame({"t_s": [0.0, 10.0], "T": [30.0, 29.123456789]})
    path = write_csv(frame, tmp_path / "out.csv")
    assert path.read_bytes() == b"t_s,T\n0,30\n10,29.1235\n"


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
