"""
Explicit Finite-Difference Solver

Forward-time centred-space stepping of

    ρc ∂T/∂t = k ∇²T + Σ sources

on a cell-centred grid, with ghost cells supplying boundary neighbours,
plus stability checking, scalar diagnostics and steady-state detection.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple
import logging
import math

import numpy as np
import pandas as pd

from .core import (
    BoundarySet,
    FixedTemperature,
    GridSpec,
    Insulated,
    Material,
    TemperatureField,
    WallLoss,
    face_axis,
)
from .exceptions import BlowUpError, DomainError, StabilityError
from .physics import SourceTerm, SurfaceCoolingSpec

logger = logging.getLogger(__name__)

SERIES_COLUMNS = ["t_s", "mean", "min", "max", "energy_J"]


@dataclass(frozen=True)
class SolverConfig:
    """
    Time-integration settings.

    Parameters
    ----------
    dt : float
        Time step Δt in seconds
    end_time : float
        Simulated duration in seconds
    snapshot_interval : float
        Spacing of recorded fields in seconds, at least ``dt``
    epsilon : float, optional
        Steady-state slope tolerance in K/s, by default 1e-4
    window : float, optional
        Steady-state trailing window in seconds, by default 300
    allow_unstable : bool, optional
        Run even when ``dt`` exceeds the stability limit, by default False
    series_every_step : bool, optional
        Record the scalar series every step instead of every snapshot
    divergence_limit : float, optional
        Largest admissible |T| in °C before a run counts as blown up
    """

    dt: float
    end_time: float
    snapshot_interval: float
    epsilon: float = 1e-4
    window: float = 300.0
    allow_unstable: bool = False
    series_every_step: bool = False
    divergence_limit: float = 1e6

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise DomainError(f"dt must be > 0, got {self.dt}")
        if not (math.isfinite(self.end_time) and self.end_time >= 0):
            raise DomainError(f"end time must be >= 0, got {self.end_time}")
        if not self.snapshot_interval >= self.dt:
            raise DomainError(
                f"snapshot interval {self.snapshot_interval} is shorter than dt {self.dt}"
            )
        if not self.epsilon > 0:
            raise DomainError(f"epsilon must be > 0, got {self.epsilon}")
        if not self.window > 0:
            raise DomainError(f"steady window must be > 0, got {self.window}")
        if not self.divergence_limit > 0:
            raise DomainError("divergence limit must be > 0")

    @property
    def n_steps(self) -> int:
        """Steps needed to reach the end time; the last step may overshoot it."""
        return max(0, int(math.ceil(self.end_time / self.dt - 1e-9)))


@dataclass(frozen=True)
class Snapshot:
    time: float
    field: TemperatureField


@dataclass(frozen=True)
class SteadyState:
    """First time the mean-temperature slope stayed under tolerance, and the mean then."""

    time: float
    temperature: float


@dataclass
class SimulationResult:
    """
    Output of a run.

    ``series`` is a DataFrame with columns t_s, mean, min, max, energy_J.
    ``dt_stable`` is the stability limit for the run's grid and material.
    """

    snapshots: List[Snapshot]
    series: pd.DataFrame
    steady: Optional[SteadyState]
    steps: int
    dt: float
    dt_stable: float
    blowup: bool = False
    epsilon: float = 1e-4
    window: float = 300.0

    @property
    def final(self) -> Snapshot:
        return self.snapshots[-1]

    @property
    def final_mean(self) -> float:
        return self.final.field.mean()

    def snapshot_at(self, time: float) -> Snapshot:
        """Snapshot recorded closest to ``time``."""
        times = np.array([snap.time for snap in self.snapshots])
        return self.snapshots[int(np.argmin(np.abs(times - time)))]


def stability_limit(material: Material, grid: GridSpec) -> float:
    """
    Largest stable explicit time step.

    Von Neumann analysis of the FTCS scheme gives
    α·Δt·Σ 1/Δxᵢ² ≤ 1/2 over the axes present in the grid.

    Parameters
    ----------
    material : Material
        Medium properties
    grid : GridSpec
        Spatial grid

    Returns
    -------
    float
        Maximum Δt in seconds; ``inf`` when the diffusivity is zero
    """
    alpha = material.diffusivity
    if alpha == 0:
        return math.inf
    return 1.0 / (2.0 * alpha * sum(1.0 / h ** 2 for h in grid.spacings))


def check_stability(material: Material, grid: GridSpec, dt: float) -> Tuple[float, bool]:
    """Return the stability limit and whether ``dt`` respects it."""
    limit = stability_limit(material, grid)
    return limit, dt <= limit


def relaxation_rate(
    material: Material, sources: Sequence[SourceTerm], wall_gain: np.ndarray
) -> float:
    """Largest per-cell linear loss rate (1/s) from surface cooling and wall faces."""
    surface = sum(s.coefficient(material) for s in sources if isinstance(s, SurfaceCoolingSpec))
    wall = float(wall_gain.max()) if wall_gain.size else 0.0
    return surface + wall


class _Stencil:
    """
    Precomputed FTCS update for one grid, material and boundary set.

    Wall faces contribute a linear term ``drive − gain·T`` on their
    boundary cells; fixed faces use an antisymmetric ghost, insulated and
    wall faces a mirror ghost.
    """

    def __init__(self, grid: GridSpec, material: Material, boundaries: BoundarySet):
        if boundaries.dims != grid.dims:
            raise DomainError(
                f"boundary set is {boundaries.dims}-D but the grid is {grid.dims}-D"
            )
        self.grid = grid
        self.material = material
        self.alpha = material.diffusivity
        self.inv_h2 = [1.0 / h ** 2 for h in grid.spacings]
        self.ghosts = {}
        self.wall_gain = np.zeros(grid.shape)
        self.wall_drive = np.zeros(grid.shape)

        for face, condition in boundaries.items():
            axis, side = face_axis(face)
            self.ghosts[(axis, side)] = condition
            if isinstance(condition, WallLoss):
                rate = condition.coefficient / (
                    material.heat_capacity * grid.spacings[axis]
                )
                index = [slice(None)] * grid.dims
                index[axis] = side
                self.wall_gain[tuple(index)] += rate
                self.wall_drive[tuple(index)] += rate * condition.exterior

    def _ghost(self, values: np.ndarray, axis: int, side: int, condition) -> np.ndarray:
        edge = np.take(values, [side], axis=axis)
        if isinstance(condition, FixedTemperature):
            return 2.0 * condition.temperature - edge
        if isinstance(condition, (Insulated, WallLoss)):
            return edge
        raise DomainError(f"unsupported boundary condition {condition!r}")

    def laplacian(self, values: np.ndarray) -> np.ndarray:
        lap = np.zeros_like(values)
        for axis in range(self.grid.dims):
            lower = self._ghost(values, axis, 0, self.ghosts[(axis, 0)])
            upper = self._ghost(values, axis, -1, self.ghosts[(axis, -1)])
            padded = np.concatenate([lower, values, upper], axis=axis)
            lap += np.diff(padded, n=2, axis=axis) * self.inv_h2[axis]
        return lap

    def advance(
        self, values: np.ndarray, sources: Sequence[SourceTerm], dt: float
    ) -> np.ndarray:
        rate = self.alpha * self.laplacian(values)
        rate += self.wall_drive - self.wall_gain * values
        for source in sources:
            rate += source.rate(values, self.material, self.grid)
        return values + dt * rate


def _diverged(values: np.ndarray, limit: float) -> bool:
    return not np.isfinite(values).all() or float(np.abs(values).max()) > limit


def step(
    temperature: TemperatureField,
    material: Material,
    sources: Sequence[SourceTerm],
    boundaries: BoundarySet,
    dt: float,
    allow_unstable: bool = False,
    divergence_limit: float = 1e6,
) -> TemperatureField:
    """
    Advance a field by one explicit Euler step.

    Parameters
    ----------
    temperature : TemperatureField
        Current field (left untouched)
    material : Material
        Medium properties
    sources : sequence of SourceTerm
        Per-cell rate contributions
    boundaries : BoundarySet
        Condition per grid face
    dt : float
        Time step in seconds
    allow_unstable : bool, optional
        Skip the stability check, by default False
    divergence_limit : float, optional
        Largest admissible |T| in °C, by default 1e6

    Returns
    -------
    TemperatureField
        Field after one step

    Raises
    ------
    StabilityError
        ``dt`` above the stability limit without ``allow_unstable``
    BlowUpError
        Non-finite or divergent values
    """
    limit = stability_limit(material, temperature.grid)
    if dt > limit and not allow_unstable:
        raise StabilityError(dt, limit)
    stencil = _Stencil(temperature.grid, material, boundaries)
    values = stencil.advance(temperature.values, sources, dt)
    if _diverged(values, divergence_limit):
        raise BlowUpError(1, dt)
    return TemperatureField(temperature.grid, values)


def _series_row(time: float, values: np.ndarray, material: Material, grid: GridSpec):
    return (
        time,
        float(values.mean()),
        float(values.min()),
        float(values.max()),
        material.heat_capacity * float(values.sum()) * grid.cell_volume,
    )


def run(
    initial: TemperatureField,
    material: Material,
    sources: Sequence[SourceTerm],
    boundaries: BoundarySet,
    config: SolverConfig,
) -> SimulationResult:
    """
    Integrate from t = 0 to the configured end time.

    Snapshots are kept at t = 0, at the first step on or after every
    multiple of the snapshot interval, and at the final step. Step times
    are ``n·dt``.

    Parameters
    ----------
    initial : TemperatureField
        Field at t = 0
    material : Material
        Medium properties
    sources : sequence of SourceTerm
        Per-cell rate contributions
    boundaries : BoundarySet
        Condition per grid face
    config : SolverConfig
        Time step, duration, recording and steady-state settings

    Returns
    -------
    SimulationResult
        Snapshots, scalar series and steady-state verdict

    Raises
    ------
    StabilityError
        ``dt`` above the stability limit and ``allow_unstable`` unset
    BlowUpError
        Divergence during the run; ``error.result`` holds the partial result
    """
    grid = initial.grid
    dt = config.dt
    limit = stability_limit(material, grid)
    if dt > limit:
        if not config.allow_unstable:
            raise StabilityError(dt, limit)
        logger.warning("dt=%g s exceeds the stability limit %g s; running anyway", dt, limit)

    stencil = _Stencil(grid, material, boundaries)
    relax = relaxation_rate(material, sources, stencil.wall_gain)
    if dt * relax > 1.0:
        logger.warning(
            "dt=%g s times the cooling rate %g 1/s exceeds 1; expect oscillation", dt, relax
        )
    n_steps = config.n_steps
    interval = config.snapshot_interval
    tol = 1e-9 * dt
    logger.info(
        "Running %d steps of dt=%g s on grid %s (limit %g s)", n_steps, dt, grid.cells, limit
    )

    values = initial.values
    snapshots = [Snapshot(0.0, initial)]
    rows = [_series_row(0.0, values, material, grid)]
    mark = 1

    def partial(steps_done: int, blowup: bool) -> SimulationResult:
        series = pd.DataFrame(rows, columns=SERIES_COLUMNS)
        steady = None if blowup else detect_steady(series, config.epsilon, config.window)
        return SimulationResult(
            snapshots=snapshots,
            series=series,
            steady=steady,
            steps=steps_done,
            dt=dt,
            dt_stable=limit,
            blowup=blowup,
            epsilon=config.epsilon,
            window=config.window,
        )

    for n in range(1, n_steps + 1):
        values = stencil.advance(values, sources, dt)
        t = n * dt
        if _diverged(values, config.divergence_limit):
            logger.info("Blow-up at step %d (t=%g s)", n, t)
            raise BlowUpError(n, t, partial(n - 1, blowup=True))

        on_mark = t >= mark * interval - tol
        last = n == n_steps
        if on_mark or last:
            snapshots.append(Snapshot(t, TemperatureField(grid, values)))
            logger.debug("Snapshot at t=%g s", t)
            if on_mark:
                mark = int(math.floor((t + tol) / interval)) + 1
        if config.series_every_step or on_mark or last:
            rows.append(_series_row(t, values, material, grid))

    result = partial(n_steps, blowup=False)
    if result.steady is None:
        logger.info("Finished %d steps; steady state not reached", n_steps)
    else:
        logger.info(
            "Finished %d steps; steady %.6g °C at t=%g s",
            n_steps, result.steady.temperature, result.steady.time,
        )
    return result


def detect_steady(
    series: pd.DataFrame, epsilon: float, window: float
) -> Optional[SteadyState]:
    """
    Find the first time the mean temperature stops changing.

    The slope of the mean is a least-squares fit over the trailing
    ``window`` seconds ending at each recorded time; only windows that fit
    entirely inside the series are considered.

    Parameters
    ----------
    series : pd.DataFrame
        Scalar series with ``t_s`` and ``mean`` columns, times increasing
    epsilon : float
        Slope tolerance in K/s
    window : float
        Trailing window length in seconds

    Returns
    -------
    SteadyState or None
        Time and mean temperature at the first qualifying point
    """
    if len(series) == 0:
        raise DomainError("series is empty")
    t = series["t_s"].to_numpy(dtype=float)
    y = series["mean"].to_numpy(dtype=float)
    tol = 1e-9 * max(window, 1.0)

    # Shift to the first sample to keep the running sums small
    x = t - t[0]
    z = y - y[0]
    zero = np.zeros(1)
    s_1 = np.arange(len(x) + 1, dtype=float)
    s_x = np.concatenate([zero, np.cumsum(x)])
    s_z = np.concatenate([zero, np.cumsum(z)])
    s_xx = np.concatenate([zero, np.cumsum(x * x)])
    s_xz = np.concatenate([zero, np.cumsum(x * z)])

    ends = np.arange(len(x))
    starts = np.searchsorted(x, x - window - tol, side="left")
    n = s_1[ends + 1] - s_1[starts]
    sx = s_x[ends + 1] - s_x[starts]
    sz = s_z[ends + 1] - s_z[starts]
    sxx = s_xx[ends + 1] - s_xx[starts]
    sxz = s_xz[ends + 1] - s_xz[starts]

    full = (x >= window - tol) & (n >= 2)
    denom = n * sxx - sx * sx
    with np.errstate(divide="ignore", invalid="ignore"):
        slope = np.where(full & (denom > 0), (n * sxz - sx * sz) / denom, np.inf)

    hits = np.flatnonzero(np.abs(slope) < epsilon)
    if hits.size == 0:
        return None
    first = int(hits[0])
    return SteadyState(time=float(t[first]), temperature=float(y[first]))
