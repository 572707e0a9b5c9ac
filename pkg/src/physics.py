"""
Heat Transfer Physics

Source terms for the conduction equation and the closed-form lumped
relations: Newton cooling, convective exchange, wall conduction, faucet
heat balance and water-level rise.

Sign convention: rates returned by source terms are temperature rates in
K/s added to the right-hand side, so surface cooling is negative whenever
the water is warmer than the air.
"""

from dataclasses import dataclass
from typing import Tuple, Union
import math

import numpy as np

from .core import GridSpec, Material, WATER, pipe_area
from .exceptions import DomainError

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class SurfaceCoolingSpec:
    """
    Convective loss through the free water surface.

    Parameters
    ----------
    h_air : float
        Convective coefficient in W/(m²·K)
    area_to_volume : float
        Exposed area per unit volume ΔA/ΔV in 1/m (1/h_w for a tub of
        uniform water depth h_w)
    ambient : float
        Air temperature T_c in °C
    """

    h_air: float
    area_to_volume: float
    ambient: float

    def __post_init__(self):
        if not self.h_air >= 0:
            raise DomainError(f"h_air must be >= 0, got {self.h_air}")
        if not self.area_to_volume >= 0:
            raise DomainError(f"area_to_volume must be >= 0, got {self.area_to_volume}")
        if not math.isfinite(self.ambient):
            raise DomainError("ambient temperature must be finite")

    def coefficient(self, material: Material) -> float:
        """Relaxation rate h_air·(ΔA/ΔV)/(ρc) in 1/s."""
        return self.h_air * self.area_to_volume / material.heat_capacity

    def with_coverage(self, factor: float) -> "SurfaceCoolingSpec":
        """
        Scale the exposed area.

        Bubbles covering the surface give ``factor < 1``; a bather
        agitating the surface gives ``factor > 1``.
        """
        return SurfaceCoolingSpec(self.h_air, self.area_to_volume * factor, self.ambient)

    def rate(self, values: np.ndarray, material: Material, grid: GridSpec) -> np.ndarray:
        return cooling_source_rate(values, self, material)


@dataclass(frozen=True)
class HeatSourceSpec:
    """
    Constant volumetric heat injection over an index box.

    Parameters
    ----------
    power : float
        Volumetric power f in W/m³
    region : tuple of (start, stop)
        Half-open cell-index range per axis
    """

    power: float
    region: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        if not math.isfinite(self.power):
            raise DomainError("source power must be finite")
        object.__setattr__(
            self, "region", tuple((int(a), int(b)) for a, b in self.region)
        )

    def rate(self, values: np.ndarray, material: Material, grid: GridSpec) -> np.ndarray:
        """Temperature rate f/(ρc) inside the region, zero elsewhere."""
        mask = grid.box_mask(self.region)
        return np.where(mask, self.power / material.heat_capacity, 0.0)


# Anything with rate(values, material, grid) -> K/s array
SourceTerm = Union[SurfaceCoolingSpec, HeatSourceSpec]


@dataclass(frozen=True)
class NewtonCoolingSpec:
    """Lumped body relaxing toward ambient with time constant ``tau`` (s)."""

    initial: float
    ambient: float
    tau: float

    def __post_init__(self):
        if not self.tau > 0:
            raise DomainError(f"tau must be > 0, got {self.tau}")

    @classmethod
    def from_surface(
        cls, initial: float, surface: SurfaceCoolingSpec, material: Material
    ) -> "NewtonCoolingSpec":
        """Lumped equivalent of the surface-cooling source term, τ = ρc/(h_air·ΔA/ΔV)."""
        coefficient = surface.coefficient(material)
        if coefficient <= 0:
            raise DomainError("surface exchange is zero; no finite time constant")
        return cls(initial, surface.ambient, 1.0 / coefficient)


def newton_temperature(spec: NewtonCoolingSpec, t: ArrayLike) -> ArrayLike:
    """
    Closed-form Newton cooling.

    T(t) = T_c + (T_0 − T_c)·exp(−t/τ)

    Parameters
    ----------
    spec : NewtonCoolingSpec
        Initial temperature, ambient and time constant
    t : float or np.ndarray
        Elapsed time(s) in seconds, non-negative

    Returns
    -------
    float or np.ndarray
        Temperature(s) in °C
    """
    if np.any(np.asarray(t) < 0):
        raise DomainError("time must be >= 0")
    return spec.ambient + (spec.initial - spec.ambient) * np.exp(-np.asarray(t) / spec.tau)


def newton_time_to_reach(spec: NewtonCoolingSpec, temperature: float) -> float:
    """
    Time for a lumped body to relax to ``temperature``.

    Returns τ·ln((T_0 − T_c)/(T − T_c)); the target must lie between the
    initial temperature (inclusive) and the ambient (exclusive).
    """
    span = spec.initial - spec.ambient
    if span == 0:
        raise DomainError("initial temperature equals ambient; target never changes")
    fraction = (temperature - spec.ambient) / span
    if not 0 < fraction <= 1:
        raise DomainError(
            f"target {temperature} not in the reachable range between "
            f"{spec.initial} and {spec.ambient} (ambient excluded)"
        )
    return spec.tau * math.log(1.0 / fraction)


def convective_rate(h_air: float, area: float, temperature: float, ambient: float) -> float:
    """Heat flow h_air·A·(T − T_c) in W; positive when the water loses heat."""
    if h_air < 0 or area < 0:
        raise DomainError("h_air and area must be >= 0")
    return h_air * area * (temperature - ambient)


def cooling_source_rate(
    temperature: ArrayLike, spec: SurfaceCoolingSpec, material: Material
) -> ArrayLike:
    """
    Per-cell temperature rate from surface cooling in K/s.

    h_air·(ΔA/ΔV)·(T_c − T)/(ρc): negative while T > T_c, zero at T_c.
    """
    return spec.coefficient(material) * (spec.ambient - temperature)


def wall_loss_rate(k_wall: float, thickness: float, area: float, delta_t: float) -> float:
    """
    Heat leaving through the tub wall in W.

    Parameters
    ----------
    k_wall : float
        Wall conductivity in W/(m·K)
    thickness : float
        Wall thickness d in m
    area : float
        Contact area S in m²
    delta_t : float
        Inside minus outside temperature in K

    Returns
    -------
    float
        k_wall·S·ΔT/d
    """
    if not thickness > 0:
        raise DomainError(f"wall thickness must be > 0, got {thickness}")
    if k_wall < 0 or area < 0:
        raise DomainError("wall conductivity and area must be >= 0")
    return k_wall * area * delta_t / thickness


def faucet_heat_requirement(q_maintain: float, q_wall: float) -> float:
    """Heat rate the faucet must supply: surface demand plus wall loss (W)."""
    if not (math.isfinite(q_maintain) and math.isfinite(q_wall)):
        raise DomainError("heat rates must be finite")
    return q_maintain + q_wall


def faucet_velocity(
    q_supply: float, material: Material, supply_delta: float, area: float
) -> float:
    """
    Inflow velocity delivering ``q_supply`` watts.

    v = q2/(ρ·c·ΔT_supply·A_pipe), where ΔT_supply is how much the supply
    water cools on mixing.
    """
    if not supply_delta > 0:
        raise DomainError(f"supply temperature drop must be > 0, got {supply_delta}")
    if not area > 0:
        raise DomainError(f"pipe area must be > 0, got {area}")
    return q_supply / (material.heat_capacity * supply_delta * area)


def water_level_rise(body_volume: float, footprint: float) -> float:
    """Rise Δh = V/a of the water level when a body of volume V enters."""
    if not footprint > 0:
        raise DomainError(f"footprint must be > 0, got {footprint}")
    if body_volume < 0:
        raise DomainError(f"body volume must be >= 0, got {body_volume}")
    return body_volume / footprint


@dataclass(frozen=True)
class FaucetDesign:
    """Lumped wall-loss and faucet balance."""

    q_maintain: float
    q_wall: float
    q_supply: float
    velocity: float


def faucet_design(
    q_maintain: float,
    q_wall: float,
    supply_delta: float,
    pipe_diameter: float,
    material: Material = WATER,
) -> FaucetDesign:
    """
    Chain the wall loss into the faucet requirement and inflow velocity.

    Parameters
    ----------
    q_maintain : float
        Heat rate needed to balance surface losses (W)
    q_wall : float
        Heat rate lost through the wall (W, positive magnitude)
    supply_delta : float
        Temperature drop of the supply water on mixing (K)
    pipe_diameter : float
        Faucet pipe diameter (m)
    material : Material, optional
        Supply medium, by default water

    Returns
    -------
    FaucetDesign
        Heat rates and the required inflow velocity
    """
    q_supply = faucet_heat_requirement(q_maintain, q_wall)
    velocity = faucet_velocity(q_supply, material, supply_delta, pipe_area(pipe_diameter))
    return FaucetDesign(q_maintain, q_wall, q_supply, velocity)
