"""
Core Domain Types

Units, material properties, structured grids, temperature fields,
boundary conditions and tub geometry shared by the physics, solver and
scenario modules. Every type here is an immutable value.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, Optional, Tuple, Union
import math

import numpy as np

from .exceptions import DomainError


class TemperatureUnit(str, Enum):
    """Temperature scales accepted at the I/O boundary."""

    CELSIUS = "C"
    FAHRENHEIT = "F"
    KELVIN = "K"

    @classmethod
    def parse(cls, unit: Union[str, "TemperatureUnit"]) -> "TemperatureUnit":
        """Accept the enum itself, a one-letter code or the full scale name."""
        if isinstance(unit, cls):
            return unit
        key = str(unit).strip().lower()
        aliases = {
            "c": cls.CELSIUS, "celsius": cls.CELSIUS,
            "f": cls.FAHRENHEIT, "fahrenheit": cls.FAHRENHEIT,
            "k": cls.KELVIN, "kelvin": cls.KELVIN,
        }
        if key not in aliases:
            raise ValueError(f"Unknown temperature unit: {unit!r}")
        return aliases[key]


def convert_temperature(value, from_unit, to_unit):
    """
    Convert temperatures between Celsius, Fahrenheit and Kelvin.

    Works on scalars and numpy arrays alike.

    Parameters
    ----------
    value : float or np.ndarray
        Temperature(s) in ``from_unit``
    from_unit, to_unit : str or TemperatureUnit
        Source and target scales

    Returns
    -------
    float or np.ndarray
        Temperature(s) in ``to_unit``
    """
    src = TemperatureUnit.parse(from_unit)
    dst = TemperatureUnit.parse(to_unit)
    if src == dst:
        return value

    if src == TemperatureUnit.FAHRENHEIT:
        celsius = (value - 32.0) * 5.0 / 9.0
    elif src == TemperatureUnit.KELVIN:
        celsius = value - 273.15
    else:
        celsius = value

    if dst == TemperatureUnit.FAHRENHEIT:
        return celsius * 9.0 / 5.0 + 32.0
    if dst == TemperatureUnit.KELVIN:
        return celsius + 273.15
    return celsius


def convert_difference(delta, from_unit, to_unit):
    """Convert a temperature difference (no offset applied)."""
    src = TemperatureUnit.parse(from_unit)
    dst = TemperatureUnit.parse(to_unit)
    scale = {
        TemperatureUnit.CELSIUS: 1.0,
        TemperatureUnit.KELVIN: 1.0,
        TemperatureUnit.FAHRENHEIT: 5.0 / 9.0,
    }
    return delta * scale[src] / scale[dst]


@dataclass(frozen=True)
class Material:
    """
    Thermal properties of a medium.

    Parameters
    ----------
    density : float
        ρ in kg/m³, strictly positive
    specific_heat : float
        c in J/(kg·K), strictly positive
    conductivity : float
        k in W/(m·K), non-negative
    """

    density: float
    specific_heat: float
    conductivity: float

    def __post_init__(self):
        for name in ("density", "specific_heat"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be finite and > 0, got {value}")
        if not (math.isfinite(self.conductivity) and self.conductivity >= 0):
            raise DomainError(
                f"conductivity must be finite and >= 0, got {self.conductivity}"
            )

    @property
    def heat_capacity(self) -> float:
        """Volumetric heat capacity ρc in J/(m³·K)."""
        return self.density * self.specific_heat

    @property
    def diffusivity(self) -> float:
        return diffusivity(self)

    def scaled(self, mixing: float) -> "Material":
        """Material whose conductivity is multiplied by a mixing factor."""
        return Material(self.density, self.specific_heat, self.conductivity * mixing)


WATER = Material(density=1000.0, specific_heat=4186.0, conductivity=0.6)


def diffusivity(material: Material) -> float:
    """
    Thermal diffusivity α = k/(ρc) in m²/s.

    Parameters
    ----------
    material : Material
        Medium properties

    Returns
    -------
    float
        Thermal diffusivity
    """
    return material.conductivity / (material.density * material.specific_heat)


AXES = ("x", "y", "z")


@dataclass(frozen=True)
class GridSpec:
    """
    Uniform, cell-centred structured grid in 1, 2 or 3 dimensions.

    Axes absent from the grid have unit extent (1 m), so a 1-D cell is a
    slab of 1 m² cross-section and a 2-D cell a column 1 m deep.

    Parameters
    ----------
    lengths : tuple of float
        Domain length per axis in metres
    cells : tuple of int
        Cell count per axis (at least 2)
    """

    lengths: Tuple[float, ...]
    cells: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "lengths", tuple(float(v) for v in self.lengths))
        object.__setattr__(self, "cells", tuple(int(n) for n in self.cells))
        if len(self.lengths) not in (1, 2, 3):
            raise DomainError(f"grid must have 1, 2 or 3 axes, got {len(self.lengths)}")
        if len(self.cells) != len(self.lengths):
            raise DomainError("lengths and cells must have the same number of axes")
        for length in self.lengths:
            if not (math.isfinite(length) and length > 0):
                raise DomainError(f"axis lengths must be > 0, got {length}")
        for count in self.cells:
            if count < 2:
                raise DomainError(f"cell counts must be >= 2, got {count}")

    @property
    def dims(self) -> int:
        return len(self.lengths)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.cells

    @property
    def spacings(self) -> Tuple[float, ...]:
        """Cell size Δx, Δy, Δz per present axis."""
        return tuple(length / count for length, count in zip(self.lengths, self.cells))

    @property
    def n_cells(self) -> int:
        return int(np.prod(self.cells))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))

    def centers(self, axis: int) -> np.ndarray:
        """Cell-centre coordinates along one axis."""
        h = self.spacings[axis]
        return (np.arange(self.cells[axis]) + 0.5) * h

    def coordinates(self) -> Tuple[np.ndarray, ...]:
        """Flattened cell-centre coordinates per axis, row-major cell order."""
        mesh = np.meshgrid(*(self.centers(a) for a in range(self.dims)), indexing="ij")
        return tuple(m.ravel() for m in mesh)

    def index_box(
        self, lo: Iterable[float], hi: Iterable[float]
    ) -> Tuple[Tuple[int, int], ...]:
        """
        Convert a metre box to a cell-index box.

        A cell belongs to the box when its centre lies in ``[lo, hi)`` on
        every axis.

        Returns
        -------
        tuple of (start, stop)
            Half-open index range per axis
        """
        lo = tuple(float(v) for v in lo)
        hi = tuple(float(v) for v in hi)
        if len(lo) != self.dims or len(hi) != self.dims:
            raise DomainError(f"box needs {self.dims} coordinates per corner")
        box = []
        for axis, (a, b) in enumerate(zip(lo, hi)):
            if a < 0 or b > self.lengths[axis] or a >= b:
                raise DomainError(
                    f"box [{a}, {b}) outside axis {AXES[axis]} of length "
                    f"{self.lengths[axis]}"
                )
            centres = self.centers(axis)
            box.append((int(np.searchsorted(centres, a, side="left")),
                        int(np.searchsorted(centres, b, side="left"))))
        return tuple(box)

    def box_mask(self, box: Tuple[Tuple[int, int], ...]) -> np.ndarray:
        """Boolean cell mask for an index box."""
        self.check_box(box)
        mask = np.zeros(self.shape, dtype=bool)
        mask[tuple(slice(start, stop) for start, stop in box)] = True
        return mask

    def check_box(self, box: Tuple[Tuple[int, int], ...]) -> None:
        if len(box) != self.dims:
            raise DomainError(f"index box needs {self.dims} axes, got {len(box)}")
        for axis, (start, stop) in enumerate(box):
            if not 0 <= start <= stop <= self.cells[axis]:
                raise DomainError(
                    f"index range [{start}, {stop}) outside axis {AXES[axis]} "
                    f"with {self.cells[axis]} cells"
                )


@dataclass(frozen=True, eq=False)
class TemperatureField:
    """
    Cell temperatures (°C) on a grid.

    The values array is copied and made read-only, so a field can be
    shared freely. Non-finite values are rejected.
    """

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.size != self.grid.n_cells:
            raise DomainError(
                f"field has {values.size} values, grid has {self.grid.n_cells} cells"
            )
        values = values.reshape(self.grid.shape)
        if not np.isfinite(values).all():
            raise DomainError("temperature field contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def uniform(cls, grid: GridSpec, temperature: float) -> "TemperatureField":
        return cls(grid, np.full(grid.shape, float(temperature)))

    def mean(self) -> float:
        return float(self.values.mean())

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())


def total_energy(field: TemperatureField, material: Material) -> float:
    """
    Thermal energy of a field relative to a 0 °C datum.

    Parameters
    ----------
    field : TemperatureField
        Temperatures in °C
    material : Material
        Medium filling every cell

    Returns
    -------
    float
        ρ·c·Σ(T_i·ΔV) in joules
    """
    return material.heat_capacity * float(field.values.sum()) * field.grid.cell_volume


# Boundary conditions

@dataclass(frozen=True)
class Insulated:
    """Zero-flux face (mirror ghost cell)."""


@dataclass(frozen=True)
class FixedTemperature:
    """Face held at a prescribed temperature (°C)."""

    temperature: float

    def __post_init__(self):
        if not math.isfinite(self.temperature):
            raise DomainError("fixed boundary temperature must be finite")


@dataclass(frozen=True)
class WallLoss:
    """
    Conduction through a tub wall to the exterior.

    Flux leaving a boundary cell is ``k_wall·(T_cell − exterior)/thickness``.
    """

    k_wall: float
    thickness: float
    exterior: float

    def __post_init__(self):
        if not self.thickness > 0:
            raise DomainError(f"wall thickness must be > 0, got {self.thickness}")
        if not self.k_wall >= 0:
            raise DomainError(f"wall conductivity must be >= 0, got {self.k_wall}")
        if not math.isfinite(self.exterior):
            raise DomainError("wall exterior temperature must be finite")

    @property
    def coefficient(self) -> float:
        """Wall conductance k_wall/d in W/(m²·K)."""
        return self.k_wall / self.thickness


BoundaryCondition = Union[Insulated, FixedTemperature, WallLoss]

FACES = ("x-", "x+", "y-", "y+", "z-", "z+")


def face_axis(face: str) -> Tuple[int, int]:
    """Map a face name such as ``"y+"`` to ``(axis, side)`` with side 0 or -1."""
    if face not in FACES:
        raise DomainError(f"unknown face {face!r}; expected one of {FACES}")
    index = FACES.index(face)
    return index // 2, (0 if face.endswith("-") else -1)


@dataclass(frozen=True)
class BoundarySet:
    """Boundary condition per grid face; unlisted faces are insulated."""

    dims: int
    faces: Tuple[Tuple[str, BoundaryCondition], ...] = field(default_factory=tuple)

    def __post_init__(self):
        seen = set()
        for face, _ in self.faces:
            axis, _side = face_axis(face)
            if axis >= self.dims:
                raise DomainError(f"face {face!r} does not exist on a {self.dims}-D grid")
            if face in seen:
                raise DomainError(f"face {face!r} assigned twice")
            seen.add(face)
        ordered = tuple(sorted(self.faces, key=lambda item: FACES.index(item[0])))
        object.__setattr__(self, "faces", ordered)

    @classmethod
    def build(
        cls,
        dims: int,
        mapping: Optional[Dict[str, BoundaryCondition]] = None,
        default: BoundaryCondition = Insulated(),
    ) -> "BoundarySet":
        """Assign ``default`` to every face of the grid, then apply ``mapping``."""
        faces = {face: default for face in FACES[: 2 * dims]}
        faces.update(mapping or {})
        return cls(dims, tuple(faces.items()))

    def get(self, face: str) -> BoundaryCondition:
        for name, condition in self.faces:
            if name == face:
                return condition
        return Insulated()

    def items(self):
        """Every face of the grid with its condition."""
        return [(face, self.get(face)) for face in FACES[: 2 * self.dims]]


@dataclass(frozen=True)
class TubGeometry:
    """
    Tub dimensions for the lumped design calculations.

    The wetted area ``wetted_area`` is configured rather than derived from
    the other dimensions.
    """

    length: float
    width: float
    water_depth: float
    total_depth: float
    wetted_area: float
    wall_thickness: float
    wall_conductivity: float

    def __post_init__(self):
        for name in ("length", "width", "water_depth", "total_depth",
                     "wetted_area", "wall_thickness"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be > 0, got {value}")
        if not (math.isfinite(self.wall_conductivity) and self.wall_conductivity >= 0):
            raise DomainError(f"wall_conductivity must be >= 0, got {self.wall_conductivity}")
        if self.total_depth < self.water_depth:
            raise DomainError("total depth must be at least the water depth")

    @property
    def footprint(self) -> float:
        """Floor area a = length × width in m²."""
        return self.length * self.width


def pipe_area(diameter: float) -> float:
    """Cross-sectional area of a round supply pipe."""
    if not diameter > 0:
        raise DomainError(f"pipe diameter must be > 0, got {diameter}")
    return math.pi * diameter ** 2 / 4.0
