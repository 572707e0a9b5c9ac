"""
Unit tests for units, materials, grids, fields and boundaries
"""

import math

import numpy as np
import pytest

from src.core import (
    WATER,
    BoundarySet,
    FixedTemperature,
    GridSpec,
    Insulated,
    Material,
    TemperatureField,
    TemperatureUnit,
    TubGeometry,
    WallLoss,
    convert_difference,
    convert_temperature,
    diffusivity,
    face_axis,
    pipe_area,
    total_energy,
)
from src.exceptions import DomainError


@pytest.fixture
def grid_1d():
    return GridSpec(lengths=(1.5,), cells=(30,))


def test_diffusivity_examples():
    assert diffusivity(Material(1.0, 1.0, 1.0)) == 1.0
    assert diffusivity(Material(1000.0, 4186.0, 0.0)) == 0.0
    assert diffusivity(WATER) == pytest.approx(1.4334e-7, rel=1e-4)


def test_diffusivity_homogeneity():
    base = Material(1000.0, 4186.0, 0.6)
    assert diffusivity(Material(1000.0, 4186.0, 1.8)) == pytest.approx(3 * diffusivity(base))
    assert diffusivity(Material(3000.0, 4186.0, 0.6)) == pytest.approx(diffusivity(base) / 3)
    assert diffusivity(Material(1000.0, 3 * 4186.0, 0.6)) == pytest.approx(diffusivity(base) / 3)


@pytest.mark.parametrize("kwargs", [
    dict(density=0.0, specific_heat=4186.0, conductivity=0.6),
    dict(density=1000.0, specific_heat=-1.0, conductivity=0.6),
    dict(density=1000.0, specific_heat=4186.0, conductivity=-0.1),
])
def test_material_rejects_invalid_properties(kwargs):
    with pytest.raises(DomainError):
        Material(**kwargs)


def test_material_scaled_multiplies_conductivity():
    mixed = WATER.scaled(2.5)
    assert mixed.conductivity == pytest.approx(1.5)
    assert mixed.density == WATER.density


def test_convert_temperature_examples():
    assert convert_temperature(32.0, "F", "C") == pytest.approx(0.0, abs=1e-12)
    assert convert_temperature(113.0, "F", "C") == pytest.approx(45.0, abs=1e-12)
    assert convert_temperature(101.0, "F", "C") == pytest.approx(38.3333, abs=1e-4)
    assert convert_temperature(0.0, "C", "K") == pytest.approx(273.15)


def test_convert_temperature_round_trip():
    rng = np.random.default_rng(0)
    values = rng.uniform(-100.0, 400.0, size=50)
    units = list(TemperatureUnit)
    for a in units:
        for b in units:
            back = convert_temperature(convert_temperature(values, a, b), b, a)
            np.testing.assert_allclose(back, values, rtol=0, atol=1e-12)


def test_unit_parse_aliases():
    assert TemperatureUnit.parse("fahrenheit") is TemperatureUnit.FAHRENHEIT
    assert TemperatureUnit.parse("c") is TemperatureUnit.CELSIUS
    with pytest.raises(ValueError):
        TemperatureUnit.parse("R")


def test_convert_difference_has_no_offset():
    assert convert_difference(1.8, "F", "C") == pytest.approx(1.0)
    assert convert_difference(1.0, "K", "C") == 1.0


def test_grid_spacings_and_counts():
    grid = GridSpec(lengths=(1.5, 0.6), cells=(30, 12))
    assert grid.spacings == pytest.approx((0.05, 0.05))
    assert grid.n_cells == 360
    assert grid.cell_volume == pytest.approx(0.0025)
    with pytest.raises(DomainError):
        GridSpec(lengths=(1.0,), cells=(1,))
    with pytest.raises(DomainError):
        GridSpec(lengths=(1.0, 2.0), cells=(4,))


def test_index_box_uses_cell_centres(grid_1d):
    assert grid_1d.index_box([0.0], [0.3]) == ((0, 6),)
    assert grid_1d.index_box([0.3], [1.5]) == ((6, 30),)
    with pytest.raises(DomainError):
        grid_1d.index_box([0.0], [2.0])


def test_coordinates_are_row_major():
    grid = GridSpec(lengths=(2.0, 1.0), cells=(2, 2))
    x, y = grid.coordinates()
    np.testing.assert_allclose(x, [0.5, 0.5, 1.5, 1.5])
    np.testing.assert_allclose(y, [0.25, 0.75, 0.25, 0.75])


def test_field_is_read_only_copy(grid_1d):
    data = np.linspace(20.0, 30.0, 30)
    field = TemperatureField(grid_1d, data)
    data[0] = 99.0
    assert field.values[0] == 20.0
    with pytest.raises(ValueError):
        field.values[0] = 1.0


def test_field_rejects_non_finite_and_wrong_size(grid_1d):
    values = np.full(30, 20.0)
    values[3] = np.nan
    with pytest.raises(DomainError):
        TemperatureField(grid_1d, values)
    with pytest.raises(DomainError):
        TemperatureField(grid_1d, np.zeros(29))


def test_total_energy_examples():
    one_cubic_metre = GridSpec(lengths=(1.0,), cells=(2,))
    assert total_energy(TemperatureField.uniform(one_cubic_metre, 0.0), WATER) == 0.0
    assert total_energy(TemperatureField.uniform(one_cubic_metre, 1.0), WATER) == pytest.approx(4.186e6)


def test_total_energy_is_linear(grid_1d):
    rng = np.random.default_rng(1)
    a = TemperatureField(grid_1d, rng.uniform(20, 45, 30))
    b = TemperatureField(grid_1d, rng.uniform(20, 45, 30))
    combo = TemperatureField(grid_1d, 2.0 * a.values - 0.5 * b.values)
    expected = 2.0 * total_energy(a, WATER) - 0.5 * total_energy(b, WATER)
    assert total_energy(combo, WATER) == pytest.approx(expected, rel=1e-12)


def test_wall_loss_invariants():
    assert WallLoss(0.2, 0.02, 7.5).coefficient == pytest.approx(10.0)
    with pytest.raises(DomainError):
        WallLoss(0.2, 0.0, 7.5)
    with pytest.raises(DomainError):
        WallLoss(-0.2, 0.02, 7.5)


def test_boundary_set_defaults_and_faces():
    bcs = BoundarySet.build(2, {"x+": FixedTemperature(10.0)})
    assert isinstance(bcs.get("x-"), Insulated)
    assert bcs.get("x+") == FixedTemperature(10.0)
    assert [face for face, _ in bcs.items()] == ["x-", "x+", "y-", "y+"]
    with pytest.raises(DomainError):
        BoundarySet.build(1, {"y-": Insulated()})
    assert face_axis("y+") == (1, -1)


def test_tub_geometry():
    tub = TubGeometry(1.5, 0.6, 0.34, 0.42, 1.908, 0.05, 0.005)
    assert tub.footprint == pytest.approx(0.9)
    with pytest.raises(DomainError):
        TubGeometry(1.5, 0.6, 0.5, 0.42, 1.908, 0.05, 0.005)


def test_tub_geometry_allows_adiabatic_wall():
    tub = TubGeometry(1.5, 0.6, 0.34, 0.42, 1.908, 0.05, 0.0)
    assert tub.wall_conductivity == 0.0
    with pytest.raises(DomainError):
        TubGeometry(1.5, 0.6, 0.34, 0.42, 1.908, 0.05, -0.1)
    with pytest.raises(DomainError):
        TubGeometry(1.5, 0.6, 0.34, 0.42, 1.908, 0.0, 0.005)


def test_pipe_area():
    assert pipe_area(0.01) == pytest.approx(7.854e-5, rel=1e-4)
    assert pipe_area(0.02) == pytest.approx(4 * pipe_area(0.01))
    with pytest.raises(DomainError):
        pipe_area(0.0)
    assert math.isclose(pipe_area(1.0), math.pi / 4)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
