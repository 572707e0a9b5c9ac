"""
Unit tests for source terms and lumped formulas
"""

import math

import numpy as np
import pytest

from src.core import WATER, BoundarySet, GridSpec, Material, TemperatureField, pipe_area
from src.exceptions import DomainError
from src.physics import (
    HeatSourceSpec,
    NewtonCoolingSpec,
    SurfaceCoolingSpec,
    convective_rate,
    cooling_source_rate,
    faucet_design,
    faucet_heat_requirement,
    faucet_velocity,
    newton_temperature,
    newton_time_to_reach,
    wall_loss_rate,
    water_level_rise,
)
from src.solver import SolverConfig, run


@pytest.fixture
def newton():
    return NewtonCoolingSpec(initial=31.33, ambient=25.0, tau=1200.0)


def test_newton_temperature_examples(newton):
    assert newton_temperature(newton, 0.0) == pytest.approx(31.33)
    assert newton_temperature(newton, 1e7) == pytest.approx(25.0)
    assert newton_temperature(newton, 1200.0) == pytest.approx(27.328, abs=1e-3)


def test_newton_temperature_is_monotone(newton):
    t = np.linspace(0.0, 6000.0, 50)
    assert (np.diff(newton_temperature(newton, t)) < 0).all()


def test_newton_time_to_reach_examples(newton):
    assert newton_time_to_reach(newton, 31.33) == 0.0
    one_tau = 25.0 + (31.33 - 25.0) / math.e
    assert newton_time_to_reach(newton, one_tau) == pytest.approx(1200.0, rel=1e-12)
    with pytest.raises(DomainError):
        newton_time_to_reach(newton, 25.0)
    with pytest.raises(DomainError):
        newton_time_to_reach(newton, 24.0)
    with pytest.raises(DomainError):
        newton_time_to_reach(newton, 32.0)


def test_newton_time_inverts_temperature(newton):
    for t in np.linspace(0.1, 10.0, 40) * newton.tau:
        temperature = newton_temperature(newton, t)
        assert newton_time_to_reach(newton, temperature) == pytest.approx(t, rel=1e-9)


def test_newton_rejects_non_positive_tau():
    with pytest.raises(DomainError):
        NewtonCoolingSpec(30.0, 20.0, 0.0)


def test_convective_rate():
    assert convective_rate(10.0, 0.9, 25.0, 25.0) == 0.0
    assert convective_rate(10.0, 0.9, 38.0, 25.0) == pytest.approx(117.0)
    assert convective_rate(10.0, 0.9, 25.0, 38.0) == pytest.approx(-117.0)


def test_cooling_source_rate():
    spec = SurfaceCoolingSpec(h_air=10.0, area_to_volume=1 / 0.34, ambient=25.0)
    assert cooling_source_rate(25.0, spec, WATER) == 0.0
    assert cooling_source_rate(35.0, spec, WATER) == pytest.approx(-7.02e-5, rel=2e-3)
    assert cooling_source_rate(15.0, spec, WATER) > 0
    doubled = SurfaceCoolingSpec(10.0, 2 / 0.34, 25.0)
    assert cooling_source_rate(35.0, doubled, WATER) == pytest.approx(
        2 * cooling_source_rate(35.0, spec, WATER)
    )


def test_surface_coverage_and_time_constant():
    spec = SurfaceCoolingSpec(h_air=10.0, area_to_volume=2.0, ambient=20.0)
    assert spec.with_coverage(0.5).area_to_volume == pytest.approx(1.0)
    lumped = NewtonCoolingSpec.from_surface(40.0, spec, WATER)
    assert lumped.tau == pytest.approx(4.186e6 / 20.0)
    with pytest.raises(DomainError):
        NewtonCoolingSpec.from_surface(40.0, spec.with_coverage(0.0), WATER)
    with pytest.raises(DomainError):
        SurfaceCoolingSpec(h_air=-1.0, area_to_volume=1.0, ambient=20.0)


def test_heat_source_rate_only_inside_region():
    grid = GridSpec((1.0,), (4,))
    source = HeatSourceSpec(power=4186.0, region=((0, 2),))
    rate = source.rate(np.zeros(4), WATER, grid)
    np.testing.assert_allclose(rate, [1e-3, 1e-3, 0.0, 0.0])
    with pytest.raises(DomainError):
        HeatSourceSpec(1.0, ((0, 5),)).rate(np.zeros(4), WATER, grid)


def test_wall_loss_rate():
    assert wall_loss_rate(0.2, 0.02, 1.908, 0.0) == 0.0
    assert wall_loss_rate(0.2, 0.04, 1.0, 10.0) == pytest.approx(
        wall_loss_rate(0.2, 0.02, 1.0, 10.0) / 2
    )
    # k_wall * dT / d lumped to 9.5003 W/m2 over S = 1.908 m2
    assert wall_loss_rate(9.5003, 1.0, 1.908, 1.0) == pytest.approx(18.126, abs=1e-3)
    with pytest.raises(DomainError):
        wall_loss_rate(0.2, 0.0, 1.0, 10.0)


def test_faucet_heat_requirement():
    assert faucet_heat_requirement(80.0, 18.126) == pytest.approx(98.126, abs=1e-12)
    assert faucet_heat_requirement(0.0, 0.0) == 0.0
    assert faucet_heat_requirement(80.0, 0.0) == 80.0
    with pytest.raises(DomainError):
        faucet_heat_requirement(float("nan"), 0.0)


def test_faucet_velocity():
    area = pipe_area(0.010)
    assert faucet_velocity(0.0, WATER, 7.1, area) == 0.0
    assert faucet_velocity(98.126, WATER, 7.1, area) == pytest.approx(0.042, abs=5e-4)
    # supply drops between 6.8 and 7.4 K bracket the quoted 0.042 m/s
    for delta in np.linspace(6.8, 7.4, 7):
        assert 0.040 <= faucet_velocity(98.126, WATER, delta, area) <= 0.044
    assert faucet_velocity(98.126, WATER, 7.1, 2 * area) == pytest.approx(
        faucet_velocity(98.126, WATER, 7.1, area) / 2
    )
    with pytest.raises(DomainError):
        faucet_velocity(98.126, WATER, 0.0, area)
    with pytest.raises(DomainError):
        faucet_velocity(98.126, WATER, 7.1, 0.0)


def test_faucet_velocity_inverts_heat_rate():
    area = pipe_area(0.010)
    v = faucet_velocity(98.126, WATER, 7.1, area)
    assert v * area * WATER.density * WATER.specific_heat * 7.1 == pytest.approx(98.126, rel=1e-12)


def test_water_level_rise():
    assert water_level_rise(0.0, 0.9) == 0.0
    assert water_level_rise(0.070, 0.9) == pytest.approx(0.07778, abs=5e-4)
    assert water_level_rise(0.070, 1.8) == pytest.approx(water_level_rise(0.070, 0.9) / 2)
    with pytest.raises(DomainError):
        water_level_rise(0.070, 0.0)


def test_faucet_design_chain():
    design = faucet_design(80.0, 18.126, 7.1, 0.010)
    assert design.q_supply == pytest.approx(98.126)
    assert design.velocity == pytest.approx(0.042, abs=5e-4)


def test_lumped_simulation_matches_newton_cooling():
    # two identical cells with insulated faces behave as one well-mixed body
    grid = GridSpec((1.0,), (2,))
    surface = SurfaceCoolingSpec(h_air=10.0, area_to_volume=1.0, ambient=20.0)
    lumped = NewtonCoolingSpec.from_surface(40.0, surface, WATER)
    config = SolverConfig(
        dt=lumped.tau / 1000,
        end_time=5 * lumped.tau,
        snapshot_interval=lumped.tau / 4,
    )
    result = run(
        TemperatureField.uniform(grid, 40.0), WATER, [surface], BoundarySet.build(1), config
    )
    assert len(result.snapshots) == 21
    for snap in result.snapshots:
        expected = newton_temperature(lumped, snap.time)
        np.testing.assert_allclose(snap.field.values, expected, rtol=1e-3)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
