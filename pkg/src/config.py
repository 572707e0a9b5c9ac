"""
Scenario Configuration

Strict JSON configuration: unknown keys are rejected at every level and
each validation error names the offending field path. Temperatures in a
document use its ``units`` scale and are held in °C once parsed.
"""

from pathlib import Path
from typing import Any, Dict, List, Optional, Union
import json
import logging
import math

from .core import (
    FACES,
    BoundarySet,
    FixedTemperature,
    GridSpec,
    Insulated,
    Material,
    TemperatureUnit,
    WallLoss,
    convert_temperature,
)
from .exceptions import ConfigError, DomainError
from .physics import SurfaceCoolingSpec
from .scenarios import (
    DesignGeometry,
    InitialCondition,
    Modifiers,
    ScenarioSpec,
    SourceSpec,
    WallSpec,
    default_boundaries,
)
from .solver import SolverConfig

logger = logging.getLogger(__name__)

TOP_LEVEL_KEYS = {
    "scenario", "units", "notes", "grid", "material", "surface", "wall",
    "source", "boundaries", "modifiers", "init", "time", "steady", "geometry",
}


class _Section:
    """Typed, path-aware access to one JSON object."""

    def __init__(self, data: Any, path: str, allowed: set):
        if not isinstance(data, dict):
            raise ConfigError("expected an object", path)
        unknown = sorted(set(data) - allowed)
        if unknown:
            key = unknown[0]
            raise ConfigError("unknown key", self._join(path, key))
        self.data = data
        self.path = path

    @staticmethod
    def _join(path: str, key: str) -> str:
        return f"{path}.{key}" if path else key

    def where(self, key: str) -> str:
        return self._join(self.path, key)

    def has(self, key: str) -> bool:
        return key in self.data

    def raw(self, key: str) -> Any:
        if key not in self.data:
            raise ConfigError("missing required field", self.where(key))
        return self.data[key]

    def number(
        self,
        key: str,
        default: Optional[float] = None,
        positive: bool = False,
        non_negative: bool = False,
    ) -> float:
        if key not in self.data and default is not None:
            return float(default)
        value = self.raw(key)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", self.where(key))
        value = float(value)
        if not math.isfinite(value):
            raise ConfigError("must be finite", self.where(key))
        if positive and not value > 0:
            raise ConfigError(f"must be > 0, got {value:g}", self.where(key))
        if non_negative and not value >= 0:
            raise ConfigError(f"must be >= 0, got {value:g}", self.where(key))
        return value

    def integer(self, key: str) -> int:
        value = self.raw(key)
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", self.where(key))
        return value

    def numbers(self, key: str, length: Optional[int] = None) -> List[float]:
        values = self.raw(key)
        if not isinstance(values, list):
            raise ConfigError("expected a list of numbers", self.where(key))
        if length is not None and len(values) != length:
            raise ConfigError(f"expected {length} entries, got {len(values)}", self.where(key))
        out = []
        for i, value in enumerate(values):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"expected a number, got {value!r}", f"{self.where(key)}[{i}]")
            out.append(float(value))
        return out

    def section(self, key: str, allowed: set) -> "_Section":
        return _Section(self.raw(key), self.where(key), allowed)


def _guard(path: str, build, *args, **kwargs):
    """Construct a domain object, reporting invariant violations at ``path``."""
    try:
        return build(*args, **kwargs)
    except DomainError as exc:
        raise ConfigError(str(exc), path) from exc


def parse_config(text: str) -> ScenarioSpec:
    """
    Parse and validate a JSON scenario document.

    Parameters
    ----------
    text : str
        JSON document

    Returns
    -------
    ScenarioSpec
        Validated spec with defaults filled, temperatures in °C

    Raises
    ------
    ConfigError
        Malformed JSON or an invalid field (the message starts with the
        field path)
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from exc
    root = _Section(document, "", TOP_LEVEL_KEYS)

    units = TemperatureUnit.CELSIUS
    if root.has("units"):
        try:
            units = TemperatureUnit.parse(root.raw("units"))
        except ValueError as exc:
            raise ConfigError(str(exc), "units") from exc

    def temperature(section: _Section, key: str) -> float:
        return float(convert_temperature(section.number(key), units, TemperatureUnit.CELSIUS))

    kind = root.raw("scenario")
    if not isinstance(kind, str):
        raise ConfigError("expected a string", "scenario")

    notes = root.data.get("notes", [])
    if not isinstance(notes, list) or not all(isinstance(n, str) for n in notes):
        raise ConfigError("expected a list of strings", "notes")

    # grid
    grid_section = root.section("grid", {"dims", "lengths_m", "cells"})
    dims = grid_section.integer("dims")
    if dims not in (1, 2, 3):
        raise ConfigError(f"must be 1, 2 or 3, got {dims}", "grid.dims")
    lengths = grid_section.numbers("lengths_m", dims)
    cells_raw = grid_section.raw("cells")
    if not isinstance(cells_raw, list) or len(cells_raw) != dims or not all(
        isinstance(n, int) and not isinstance(n, bool) for n in cells_raw
    ):
        raise ConfigError(f"expected {dims} integers", "grid.cells")
    grid = _guard("grid", GridSpec, tuple(lengths), tuple(cells_raw))

    # material
    mat = root.section("material", {"rho", "c", "k"})
    material = Material(
        density=mat.number("rho", positive=True),
        specific_heat=mat.number("c", positive=True),
        conductivity=mat.number("k", non_negative=True),
    )

    surface = None
    if root.has("surface"):
        sec = root.section("surface", {"h_air", "ambient", "area_to_volume"})
        surface = SurfaceCoolingSpec(
            h_air=sec.number("h_air", non_negative=True),
            area_to_volume=sec.number("area_to_volume", non_negative=True),
            ambient=temperature(sec, "ambient"),
        )

    wall = None
    if root.has("wall"):
        sec = root.section("wall", {"k_wall", "thickness_m", "area_m2", "exterior"})
        wall = WallSpec(
            k_wall=sec.number("k_wall", non_negative=True),
            thickness=sec.number("thickness_m", positive=True),
            area=sec.number("area_m2", positive=True),
            exterior=temperature(sec, "exterior"),
        )

    source = None
    if root.has("source"):
        sec = root.section("source", {"power", "region"})
        region = sec.section("region", {"lo", "hi"})
        source = SourceSpec(
            power=sec.number("power"),
            lo=tuple(region.numbers("lo", dims)),
            hi=tuple(region.numbers("hi", dims)),
        )
        _guard("source.region", source.to_term, grid)

    boundaries = default_boundaries(dims, wall)
    if root.has("boundaries"):
        sec = root.section("boundaries", set(FACES[: 2 * dims]))
        mapping = {}
        for face, value in sec.data.items():
            path = sec.where(face)
            if value == "insulated":
                mapping[face] = Insulated()
            elif value == "wall":
                if wall is None:
                    raise ConfigError("wall boundary needs a wall section", path)
                mapping[face] = wall.to_boundary()
            elif isinstance(value, dict):
                fixed = _Section(value, path, {"fixed"})
                mapping[face] = FixedTemperature(temperature(fixed, "fixed"))
            else:
                raise ConfigError(
                    'expected "insulated", "wall" or {"fixed": temperature}', path
                )
        boundaries = BoundarySet.build(dims, {**dict(boundaries.items()), **mapping})

    modifiers = Modifiers()
    if root.has("modifiers"):
        sec = root.section("modifiers", {"mixing", "surface_factor"})
        modifiers = Modifiers(
            mixing=sec.number("mixing", default=1.0, non_negative=True),
            surface_factor=sec.number("surface_factor", default=1.0, non_negative=True),
        )

    init = root.section("init", {"uniform", "regions"})
    if init.has("uniform") == init.has("regions"):
        raise ConfigError('expected exactly one of "uniform" or "regions"', "init")
    if init.has("uniform"):
        initial = InitialCondition(uniform=temperature(init, "uniform"))
    else:
        entries = init.raw("regions")
        if not isinstance(entries, list) or not entries:
            raise ConfigError("expected a non-empty list", "init.regions")
        regions = []
        for i, entry in enumerate(entries):
            sec = _Section(entry, f"init.regions[{i}]", {"lo", "hi", "temp"})
            lo = sec.numbers("lo", dims)
            hi = sec.numbers("hi", dims)
            _guard(sec.path, grid.index_box, lo, hi)
            regions.append((tuple(lo), tuple(hi), temperature(sec, "temp")))
        initial = InitialCondition(regions=tuple(regions))
        _guard("init.regions", initial.build, grid)

    time = root.section("time", {"dt_s", "end_s", "snapshot_s", "series", "divergence_limit"})
    series = time.data.get("series", "snapshot")
    if series not in ("snapshot", "step"):
        raise ConfigError('expected "snapshot" or "step"', "time.series")
    steady_eps, steady_window = 1e-4, 300.0
    if root.has("steady"):
        sec = root.section("steady", {"epsilon", "window_s"})
        steady_eps = sec.number("epsilon", default=1e-4, positive=True)
        steady_window = sec.number("window_s", default=300.0, positive=True)
    dt = time.number("dt_s", positive=True)
    snapshot = time.number("snapshot_s", positive=True)
    if snapshot < dt:
        raise ConfigError(f"must be >= dt_s ({dt:g})", "time.snapshot_s")
    solver = SolverConfig(
        dt=dt,
        end_time=time.number("end_s", non_negative=True),
        snapshot_interval=snapshot,
        epsilon=steady_eps,
        window=steady_window,
        series_every_step=series == "step",
        divergence_limit=time.number("divergence_limit", default=1e6, positive=True),
    )

    geometry = None
    if root.has("geometry"):
        sec = root.section(
            "geometry",
            {"length_m", "width_m", "body_volume_m3", "pipe_diameter_m",
             "depth_bounds_m", "supply_delta_K", "resolution_m"},
        )
        bounds = (0.2, 0.9)
        if sec.has("depth_bounds_m"):
            bounds = tuple(sec.numbers("depth_bounds_m", 2))
            if not 0 < bounds[0] < bounds[1]:
                raise ConfigError("must satisfy 0 < lo < hi", sec.where("depth_bounds_m"))
        geometry = DesignGeometry(
            length=sec.number("length_m", positive=True),
            width=sec.number("width_m", positive=True),
            body_volume=sec.number("body_volume_m3", non_negative=True),
            pipe_diameter=sec.number("pipe_diameter_m", positive=True),
            depth_bounds=bounds,
            supply_delta=sec.number("supply_delta_K", default=7.1, positive=True),
            resolution=sec.number("resolution_m", default=1e-3, positive=True),
        )

    spec = _guard(
        "scenario",
        ScenarioSpec,
        kind=kind,
        grid=grid,
        material=material,
        initial=initial,
        solver=solver,
        boundaries=boundaries,
        surface=surface,
        wall=wall,
        source=source,
        geometry=geometry,
        modifiers=modifiers,
        units=units,
        notes=tuple(notes),
    )
    logger.debug("Parsed %s config on grid %s", kind, grid.cells)
    return spec


def load_config(path: Union[str, Path]) -> ScenarioSpec:
    """Read and parse a config file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    except UnicodeDecodeError as exc:
        raise ConfigError(f"cannot decode {path} as UTF-8: {exc.reason}") from exc
    return parse_config(text)


def serialize_config(spec: ScenarioSpec) -> str:
    """
    Render a spec as a JSON document that parses back to an equal spec.

    Temperatures are written in the spec's ``units``; every default is
    written out explicitly.
    """
    units = spec.units

    def out(celsius: float) -> float:
        return float(convert_temperature(celsius, TemperatureUnit.CELSIUS, units))

    doc: Dict[str, Any] = {"scenario": spec.kind, "units": units.value}
    if spec.notes:
        doc["notes"] = list(spec.notes)
    doc["grid"] = {
        "dims": spec.grid.dims,
        "lengths_m": list(spec.grid.lengths),
        "cells": list(spec.grid.cells),
    }
    doc["material"] = {
        "rho": spec.material.density,
        "c": spec.material.specific_heat,
        "k": spec.material.conductivity,
    }
    if spec.surface is not None:
        doc["surface"] = {
            "h_air": spec.surface.h_air,
            "ambient": out(spec.surface.ambient),
            "area_to_volume": spec.surface.area_to_volume,
        }
    if spec.wall is not None:
        doc["wall"] = {
            "k_wall": spec.wall.k_wall,
            "thickness_m": spec.wall.thickness,
            "area_m2": spec.wall.area,
            "exterior": out(spec.wall.exterior),
        }
    if spec.source is not None:
        doc["source"] = {
            "power": spec.source.power,
            "region": {"lo": list(spec.source.lo), "hi": list(spec.source.hi)},
        }
    boundaries = {}
    for face, condition in spec.boundaries.items():
        if isinstance(condition, FixedTemperature):
            boundaries[face] = {"fixed": out(condition.temperature)}
        elif isinstance(condition, WallLoss):
            if spec.wall is None or condition != spec.wall.to_boundary():
                raise ConfigError("wall boundary differs from the wall section", f"boundaries.{face}")
            boundaries[face] = "wall"
        else:
            boundaries[face] = "insulated"
    doc["boundaries"] = boundaries
    doc["modifiers"] = {
        "mixing": spec.modifiers.mixing,
        "surface_factor": spec.modifiers.surface_factor,
    }
    if spec.initial.uniform is not None:
        doc["init"] = {"uniform": out(spec.initial.uniform)}
    else:
        doc["init"] = {
            "regions": [
                {"lo": list(lo), "hi": list(hi), "temp": out(temp)}
                for lo, hi, temp in spec.initial.regions
            ]
        }
    solver = spec.solver
    doc["time"] = {
        "dt_s": solver.dt,
        "end_s": solver.end_time,
        "snapshot_s": solver.snapshot_interval,
        "series": "step" if solver.series_every_step else "snapshot",
        "divergence_limit": solver.divergence_limit,
    }
    doc["steady"] = {"epsilon": solver.epsilon, "window_s": solver.window}
    if spec.geometry is not None:
        geo = spec.geometry
        doc["geometry"] = {
            "length_m": geo.length,
            "width_m": geo.width,
            "body_volume_m3": geo.body_volume,
            "pipe_diameter_m": geo.pipe_diameter,
            "depth_bounds_m": list(geo.depth_bounds),
            "supply_delta_K": geo.supply_delta,
            "resolution_m": geo.resolution,
        }
    return json.dumps(doc, indent=2)

