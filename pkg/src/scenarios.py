"""
Scenarios, Sweeps and Design Search

Builders for the standard bathtub experiments (surface cooling, local
hot-water addition with and without cooling, continuous heating), steady
temperature sweeps over depth, conductivity or source power, and the
bisection search for the water depth that holds a target temperature.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
import pandas as pd
import statsmodels.api as sm
from scipy.optimize import bisect
from tqdm import tqdm

from .core import (
    BoundarySet,
    GridSpec,
    Insulated,
    Material,
    TemperatureField,
    TemperatureUnit,
    TubGeometry,
    WallLoss,
    WATER,
)
from .exceptions import BracketError, DomainError, SteadyStateNotReached
from .physics import (
    FaucetDesign,
    HeatSourceSpec,
    SurfaceCoolingSpec,
    faucet_design,
    wall_loss_rate,
    water_level_rise,
)
from .solver import SimulationResult, SolverConfig, run

logger = logging.getLogger(__name__)

SCENARIO_KINDS = (
    "surface_cooling_2d",
    "local_add_1d",
    "local_add_cooling_1d",
    "continuous_source_1d",
    "sweep",
    "design_depth",
)

SWEEP_PARAMETERS = ("depth", "k", "Q")


@dataclass(frozen=True)
class InitialCondition:
    """
    Uniform temperature, or a list of ``(lo, hi, temperature)`` boxes in
    metres that together cover every cell exactly once.
    """

    uniform: Optional[float] = None
    regions: Tuple[Tuple[Tuple[float, ...], Tuple[float, ...], float], ...] = ()

    def __post_init__(self):
        if (self.uniform is None) == (len(self.regions) == 0):
            raise DomainError("initial condition needs either a uniform value or regions")
        object.__setattr__(
            self,
            "regions",
            tuple(
                (tuple(float(v) for v in lo), tuple(float(v) for v in hi), float(temp))
                for lo, hi, temp in self.regions
            ),
        )
        temps = [self.uniform] if self.uniform is not None else [r[2] for r in self.regions]
        if not all(math.isfinite(t) for t in temps):
            raise DomainError("initial temperatures must be finite")

    def build(self, grid: GridSpec) -> TemperatureField:
        if self.uniform is not None:
            return TemperatureField.uniform(grid, self.uniform)
        values = np.zeros(grid.shape)
        hits = np.zeros(grid.shape, dtype=int)
        for lo, hi, temp in self.regions:
            mask = grid.box_mask(grid.index_box(lo, hi))
            values[mask] = temp
            hits += mask
        if (hits != 1).any():
            raise DomainError(
                f"initial regions must cover every cell exactly once; "
                f"{int((hits == 0).sum())} uncovered, {int((hits > 1).sum())} overlapping"
            )
        return TemperatureField(grid, values)


@dataclass(frozen=True)
class SourceSpec:
    """Volumetric heat source f (W/m³) over a metre box ``[lo, hi)``."""

    power: float
    lo: Tuple[float, ...]
    hi: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(float(v) for v in self.lo))
        object.__setattr__(self, "hi", tuple(float(v) for v in self.hi))
        if not math.isfinite(self.power):
            raise DomainError("source power must be finite")

    def to_term(self, grid: GridSpec) -> HeatSourceSpec:
        return HeatSourceSpec(self.power, grid.index_box(self.lo, self.hi))


@dataclass(frozen=True)
class WallSpec:
    """Tub wall: conductivity, thickness, wetted area S and exterior temperature."""

    k_wall: float
    thickness: float
    area: float
    exterior: float

    def __post_init__(self):
        # reuse the boundary invariants
        self.to_boundary()
        if not self.area > 0:
            raise DomainError(f"wall area must be > 0, got {self.area}")

    def to_boundary(self) -> WallLoss:
        return WallLoss(self.k_wall, self.thickness, self.exterior)


@dataclass(frozen=True)
class DesignGeometry:
    """Tub footprint, bather volume, faucet pipe and design search settings."""

    length: float
    width: float
    body_volume: float
    pipe_diameter: float
    depth_bounds: Tuple[float, float] = (0.2, 0.9)
    supply_delta: float = 7.1
    resolution: float = 1e-3

    def __post_init__(self):
        object.__setattr__(self, "depth_bounds", tuple(float(v) for v in self.depth_bounds))
        for name in ("length", "width", "pipe_diameter", "supply_delta", "resolution"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be > 0, got {getattr(self, name)}")
        if not self.body_volume >= 0:
            raise DomainError(f"body_volume must be >= 0, got {self.body_volume}")
        lo, hi = self.depth_bounds
        if not 0 < lo < hi:
            raise DomainError(f"depth bounds must satisfy 0 < lo < hi, got {self.depth_bounds}")

    @property
    def footprint(self) -> float:
        return self.length * self.width


@dataclass(frozen=True)
class Modifiers:
    """
    Scalar knobs for a bather's influence.

    ``mixing`` multiplies the conductivity (movement stirs the water);
    ``surface_factor`` multiplies ΔA/ΔV (bubbles cover the surface when
    below one, splashing exposes more of it when above).
    """

    mixing: float = 1.0
    surface_factor: float = 1.0

    def __post_init__(self):
        if not (self.mixing >= 0 and self.surface_factor >= 0):
            raise DomainError("modifiers must be >= 0")


@dataclass(frozen=True)
class ScenarioSpec:
    """
    Everything needed to run one experiment.

    Temperatures are stored in °C; ``units`` only records the scale of the
    originating document and the default output scale.
    """

    kind: str
    grid: GridSpec
    material: Material
    initial: InitialCondition
    solver: SolverConfig
    boundaries: BoundarySet
    surface: Optional[SurfaceCoolingSpec] = None
    wall: Optional[WallSpec] = None
    source: Optional[SourceSpec] = None
    geometry: Optional[DesignGeometry] = None
    modifiers: Modifiers = field(default_factory=Modifiers)
    units: TemperatureUnit = TemperatureUnit.CELSIUS
    notes: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise DomainError(f"unknown scenario {self.kind!r}; expected one of {SCENARIO_KINDS}")
        if self.boundaries.dims != self.grid.dims:
            raise DomainError("boundary set does not match the grid dimensions")
        object.__setattr__(self, "notes", tuple(self.notes))
        # Fails early on regions outside the grid
        self.initial.build(self.grid)
        if self.source is not None:
            self.source.to_term(self.grid)

    def sources(self) -> list:
        """Source terms with the modifiers applied."""
        terms = []
        if self.surface is not None:
            terms.append(self.surface.with_coverage(self.modifiers.surface_factor))
        if self.source is not None:
            terms.append(self.source.to_term(self.grid))
        return terms

    def effective_material(self) -> Material:
        return self.material.scaled(self.modifiers.mixing)


def default_boundaries(dims: int, wall: Optional[WallSpec]) -> BoundarySet:
    """Every face a wall when a wall section exists, otherwise insulated."""
    default = wall.to_boundary() if wall is not None else Insulated()
    return BoundarySet.build(dims, default=default)


def simulate(spec: ScenarioSpec) -> SimulationResult:
    """Run any spec on its own grid, 1-D to 3-D."""
    logger.info("Simulating %s on a %d-D grid", spec.kind, spec.grid.dims)
    return run(
        spec.initial.build(spec.grid),
        spec.effective_material(),
        spec.sources(),
        spec.boundaries,
        spec.solver,
    )


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise DomainError(message)


def _all_insulated(spec: ScenarioSpec) -> bool:
    return all(isinstance(c, Insulated) for _, c in spec.boundaries.items())


def surface_cooling_2d(spec: ScenarioSpec) -> SimulationResult:
    """
    Conduction plus surface cooling across a 2-D slice of the tub.

    With wall faces on the sides the corners lose heat through two faces
    and stay at or below the centre.
    """
    _require(spec.grid.dims == 2, "surface cooling scenario needs a 2-D grid")
    _require(spec.surface is not None, "surface cooling scenario needs a surface section")
    _require(
        spec.source is None or spec.source.power == 0,
        "surface cooling scenario takes no heat injection",
    )
    return simulate(spec)


def local_add_1d(spec: ScenarioSpec) -> SimulationResult:
    """
    Hot water added to one end of an insulated 1-D tub.

    The field relaxes to the volume-weighted mean of the initial data.
    """
    _require(spec.grid.dims == 1, "local-add scenario needs a 1-D grid")
    _require(_all_insulated(spec), "local-add scenario needs insulated ends")
    _require(spec.source is None, "local-add scenario takes no heat injection")
    _require(
        spec.surface is None or spec.surface.h_air * spec.surface.area_to_volume == 0,
        "local-add scenario takes no surface cooling",
    )
    return simulate(spec)


def local_add_cooling_1d(spec: ScenarioSpec) -> SimulationResult:
    """Local hot-water addition with surface cooling switched on."""
    _require(spec.grid.dims == 1, "local-add scenario needs a 1-D grid")
    _require(_all_insulated(spec), "local-add scenario needs insulated ends")
    _require(spec.source is None, "local-add scenario takes no heat injection")
    _require(spec.surface is not None, "cooling scenario needs a surface section")
    return simulate(spec)


def adiabatic(spec: ScenarioSpec) -> ScenarioSpec:
    """Same spec with the surface cooling removed."""
    return replace(spec, kind="local_add_1d", surface=None)


def with_parameter(spec: ScenarioSpec, name: str, value: float) -> ScenarioSpec:
    """
    Copy of ``spec`` with one sweep parameter changed.

    ``depth`` sets ΔA/ΔV = 1/h_w, ``k`` the water conductivity and ``Q``
    the source power.
    """
    if name == "depth":
        _require(spec.surface is not None, "depth sweep needs a surface section")
        _require(value > 0, f"depth must be > 0, got {value}")
        return replace(spec, surface=replace(spec.surface, area_to_volume=1.0 / value))
    if name == "k":
        _require(value >= 0, f"conductivity must be >= 0, got {value}")
        return replace(spec, material=replace(spec.material, conductivity=value))
    if name == "Q":
        _require(spec.source is not None, "Q sweep needs a source section")
        return replace(spec, source=replace(spec.source, power=value))
    raise DomainError(f"unknown sweep parameter {name!r}; expected one of {SWEEP_PARAMETERS}")


@dataclass(frozen=True)
class SweepResult:
    """Steady temperatures (°C, None when not reached) per parameter value."""

    parameter: str
    values: Tuple[float, ...]
    steady: Tuple[Optional[float], ...]
    steady_times: Tuple[Optional[float], ...]

    def __post_init__(self):
        if not (len(self.values) == len(self.steady) == len(self.steady_times)):
            raise DomainError("sweep columns differ in length")
        diffs = np.diff(np.asarray(self.values, dtype=float))
        if len(diffs) and not ((diffs > 0).all() or (diffs < 0).all()):
            raise DomainError("sweep values must be strictly monotone")

    @property
    def complete(self) -> bool:
        return all(s is not None for s in self.steady)

    def is_increasing(self) -> bool:
        y = [s for s in self.steady if s is not None]
        return self.complete and bool((np.diff(y) > 0).all())

    def is_decreasing(self) -> bool:
        y = [s for s in self.steady if s is not None]
        return self.complete and bool((np.diff(y) < 0).all())

    def affine_fit(self) -> Tuple[float, float, float]:
        """
        Least-squares line through the reached steady temperatures.

        Returns
        -------
        tuple of float
            (slope, intercept, R²)
        """
        pairs = [(v, s) for v, s in zip(self.values, self.steady) if s is not None]
        if len(pairs) < 2:
            raise DomainError("affine fit needs at least two steady values")
        x, y = (np.array(col, dtype=float) for col in zip(*pairs))
        model = sm.OLS(y, sm.add_constant(x)).fit()
        intercept, slope = model.params
        return float(slope), float(intercept), float(model.rsquared)

    def best_value(self, target: float) -> Optional[float]:
        """
        Parameter value whose steady temperature is closest to ``target``.

        Entries that never settled are skipped; ties go to the earlier
        value. ``target`` must be in the same unit as ``steady``.

        Returns
        -------
        float or None
            The chosen value, or None when no entry settled
        """
        reached = [(abs(s - target), i) for i, s in enumerate(self.steady) if s is not None]
        if not reached:
            return None
        return self.values[min(reached)[1]]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                self.parameter: list(self.values),
                "steady_temperature": list(self.steady),
                "steady_time_s": list(self.steady_times),
            }
        )


def _steady_entry(args) -> Tuple[Optional[float], Optional[float]]:
    spec, name, value = args
    steady = simulate(with_parameter(spec, name, value)).steady
    if steady is None:
        logger.warning("%s=%g: steady state not reached", name, value)
        return None, None
    logger.info("%s=%g: steady %.6g °C at t=%g s", name, value, steady.temperature, steady.time)
    return steady.temperature, steady.time


def _map_entries(tasks: list, jobs: int, progress: bool, desc: str) -> list:
    """Evaluate tasks, in a process pool when ``jobs > 1``; order follows ``tasks``."""
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(tqdm(pool.map(_steady_entry, tasks), total=len(tasks),
                             desc=desc, disable=not progress))
    return [_steady_entry(task) for task in tqdm(tasks, desc=desc, disable=not progress)]


def sweep(
    spec: ScenarioSpec,
    parameter: str,
    values: Sequence[float],
    jobs: int = 1,
    progress: bool = False,
) -> SweepResult:
    """
    Steady temperature for each value of one parameter.

    Parameters
    ----------
    spec : ScenarioSpec
        Base scenario
    parameter : str
        ``depth`` (water depth h_w in m), ``k`` (conductivity) or ``Q``
        (source power)
    values : sequence of float
        Strictly monotone parameter values
    jobs : int, optional
        Worker processes, by default 1
    progress : bool, optional
        Show a progress bar, by default False

    Returns
    -------
    SweepResult
        Rows in the order of ``values``
    """
    if parameter not in SWEEP_PARAMETERS:
        raise DomainError(f"unknown sweep parameter {parameter!r}")
    values = tuple(float(v) for v in values)
    if not values:
        raise DomainError("sweep needs at least one value")
    if parameter != "Q" and min(values) <= 0:
        raise DomainError(f"{parameter} values must be > 0")
    steps = np.diff(values)
    if len(steps) and not ((steps > 0).all() or (steps < 0).all()):
        raise DomainError("sweep values must be strictly monotone")
    # validate every variant before spending time on runs
    for value in values:
        with_parameter(spec, parameter, value)

    logger.info("Sweeping %s over %d values", parameter, len(values))
    tasks = [(spec, parameter, value) for value in values]
    rows = _map_entries(tasks, jobs, progress, f"sweep {parameter}")
    steady, times = zip(*rows)
    return SweepResult(parameter, values, tuple(steady), tuple(times))


def continuous_source_1d(
    spec: ScenarioSpec, q_values: Sequence[float], jobs: int = 1, progress: bool = False
) -> SweepResult:
    """Steady temperature of the continuously heated 1-D tub for each source power."""
    _require(spec.grid.dims == 1, "continuous-source scenario needs a 1-D grid")
    _require(spec.source is not None, "continuous-source scenario needs a source section")
    _require(spec.surface is not None, "continuous-source scenario needs a surface section")
    _require(spec.initial.uniform is not None, "continuous-source scenario needs a uniform start")
    return sweep(spec, "Q", q_values, jobs=jobs, progress=progress)


@dataclass(frozen=True)
class DepthDesign:
    """Result of the depth search plus the derived tub and faucet figures."""

    target: float
    tolerance: float
    water_depth: float
    steady_temperature: float
    level_rise: float
    total_depth: float
    footprint: float
    iterations: int
    evaluations: int
    tub: Optional[TubGeometry] = None
    faucet: Optional[FaucetDesign] = None


def design_depth(
    spec: ScenarioSpec, target: float, tolerance: float, jobs: int = 1
) -> DepthDesign:
    """
    Water depth whose steady temperature matches ``target``.

    Steady temperature increases with depth, so the search bisects h_w over
    the configured bounds down to the configured resolution.

    Parameters
    ----------
    spec : ScenarioSpec
        Heated scenario with ``geometry`` (and optionally ``wall``)
    target : float
        Desired steady temperature in °C
    tolerance : float
        Accepted deviation in K
    jobs : int, optional
        Processes used for the two bracket evaluations, by default 1

    Returns
    -------
    DepthDesign
        Water depth, total depth and faucet chain

    Raises
    ------
    BracketError
        Target outside the range spanned by the depth bounds
    SteadyStateNotReached
        A candidate depth never settled
    """
    geometry = spec.geometry
    _require(geometry is not None, "design needs a geometry section")
    _require(tolerance > 0, f"tolerance must be > 0, got {tolerance}")
    lo, hi = geometry.depth_bounds
    cache: Dict[float, float] = {}

    def steady_at(depth: float) -> float:
        if depth not in cache:
            temperature, _ = _steady_entry((spec, "depth", depth))
            if temperature is None:
                raise SteadyStateNotReached(f"no steady state at depth {depth:g} m")
            cache[depth] = temperature
            logger.debug("depth %.6g m -> %.6g °C", depth, temperature)
        return cache[depth]

    ends = _map_entries([(spec, "depth", lo), (spec, "depth", hi)], jobs, False, "bracket")
    for depth, (temperature, _) in zip((lo, hi), ends):
        if temperature is None:
            raise SteadyStateNotReached(f"no steady state at depth {depth:g} m")
        cache[depth] = temperature
    logger.info(
        "Depth bracket [%g, %g] m gives [%.6g, %.6g] °C for target %.6g °C",
        lo, hi, cache[lo], cache[hi], target,
    )

    iterations = 0
    if abs(cache[lo] - target) <= tolerance:
        depth = lo
    elif abs(cache[hi] - target) <= tolerance:
        depth = hi
    elif (cache[lo] - target) * (cache[hi] - target) > 0:
        raise BracketError(
            f"target {target:.6g} °C outside [{min(cache[lo], cache[hi]):.6g}, "
            f"{max(cache[lo], cache[hi]):.6g}] °C reachable over depths [{lo:g}, {hi:g}] m"
        )
    else:
        depth, info = bisect(
            lambda h: steady_at(h) - target, lo, hi,
            xtol=geometry.resolution, full_output=True,
        )
        iterations = info.iterations

    steady = steady_at(depth)
    if abs(steady - target) > tolerance:
        raise BracketError(
            f"depth {depth:.6g} m gives {steady:.6g} °C, more than {tolerance:g} K "
            f"from the target at resolution {geometry.resolution:g} m"
        )

    rise = water_level_rise(geometry.body_volume, geometry.footprint)
    tub = None
    faucet = None
    if spec.wall is not None:
        wall = spec.wall
        tub = TubGeometry(
            length=geometry.length,
            width=geometry.width,
            water_depth=depth,
            total_depth=depth + rise,
            wetted_area=wall.area,
            wall_thickness=wall.thickness,
            wall_conductivity=wall.k_wall,
        )
        q_wall = wall_loss_rate(wall.k_wall, wall.thickness, wall.area, steady - wall.exterior)
        q_maintain = spec.source.power if spec.source is not None else 0.0
        faucet = faucet_design(
            q_maintain, q_wall, geometry.supply_delta, geometry.pipe_diameter, WATER
        )
    logger.info("Design depth h_w=%.4g m, total depth %.4g m", depth, depth + rise)
    return DepthDesign(
        target=target,
        tolerance=tolerance,
        water_depth=float(depth),
        steady_temperature=steady,
        level_rise=rise,
        total_depth=float(depth) + rise,
        footprint=geometry.footprint,
        iterations=iterations,
        evaluations=len(cache),
        tub=tub,
        faucet=faucet,
    )


def corner_center_trace(result: SimulationResult) -> pd.DataFrame:
    """
    Corner and centre temperature at each snapshot.

    The corner is the first cell in row-major order, the centre the cell
    at half the count along every axis.
    """
    rows: List[Tuple[float, float, float]] = []
    for snap in result.snapshots:
        values = snap.field.values
        centre = tuple(n // 2 for n in values.shape)
        rows.append((snap.time, float(values.flat[0]), float(values[centre])))
    return pd.DataFrame(rows, columns=["t_s", "corner", "center"])
