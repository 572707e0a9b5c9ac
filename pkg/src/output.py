"""
Result Files

CSV and JSON writers. CSV numbers use six significant digits in fixed
notation so repeated runs produce identical bytes; JSON carries raw
floats. Temperatures are converted to the requested unit here and
nowhere else.
"""

from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, Optional, Union
import json
import logging
import math

import numpy as np
import pandas as pd

from .core import AXES, TemperatureUnit, convert_difference, convert_temperature
from .scenarios import DepthDesign, ScenarioSpec, SweepResult
from .solver import SimulationResult

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def format_number(value: Optional[float]) -> str:
    """Six significant digits, fixed notation; empty for missing values."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    value = float(value)
    if value == 0:
        value = 0.0  # drop the sign of -0.0
    return np.format_float_positional(
        value, precision=6, unique=False, fractional=False, trim="-"
    )


def _to_unit(celsius, unit: TemperatureUnit):
    return convert_temperature(celsius, TemperatureUnit.CELSIUS, unit)


def _json_float(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def write_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    """Write a frame with every number passed through ``format_number``."""
    path = Path(path)
    text = frame.copy()
    for column in text.columns:
        text[column] = text[column].map(format_number)
    text.to_csv(path, index=False, lineterminator="\n")
    logger.debug("Wrote %s (%d rows)", path, len(text))
    return path


def write_json(data: Dict[str, Any], path: PathLike) -> Path:
    path = Path(path)
    path.write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")
    return path


def snapshots_frame(result: SimulationResult, unit: TemperatureUnit) -> pd.DataFrame:
    """One row per cell per snapshot: t_s, x_m[, y_m[, z_m]], T."""
    if not result.snapshots:
        return pd.DataFrame(columns=["t_s", "T"])
    grid = result.snapshots[0].field.grid
    coords = grid.coordinates()
    frames = []
    for snap in result.snapshots:
        columns = {"t_s": np.full(grid.n_cells, snap.time)}
        for axis, values in enumerate(coords):
            columns[f"{AXES[axis]}_m"] = values
        columns["T"] = _to_unit(snap.field.values.ravel(), unit)
        frames.append(pd.DataFrame(columns))
    return pd.concat(frames, ignore_index=True)


def series_frame(result: SimulationResult, unit: TemperatureUnit) -> pd.DataFrame:
    frame = result.series.copy()
    for column in ("mean", "min", "max"):
        frame[column] = _to_unit(frame[column].to_numpy(), unit)
    return frame


def summary(spec: ScenarioSpec, result: SimulationResult, unit: TemperatureUnit) -> Dict[str, Any]:
    """summary.json content for a single run."""
    steady = result.steady
    return {
        "scenario": spec.kind,
        "units": unit.value,
        "steady_temperature": None if steady is None else float(_to_unit(steady.temperature, unit)),
        "steady_time_s": None if steady is None else steady.time,
        "final_mean": float(_to_unit(result.final_mean, unit)),
        "dt_used_s": result.dt,
        "dt_stable_max_s": _json_float(result.dt_stable),
        "steps": result.steps,
        "blowup": result.blowup,
    }


def write_run(
    spec: ScenarioSpec, result: SimulationResult, out_dir: Path, unit: TemperatureUnit
) -> list:
    """Write snapshots.csv, series.csv and summary.json; return the paths."""
    return [
        write_csv(snapshots_frame(result, unit), out_dir / "snapshots.csv"),
        write_csv(series_frame(result, unit), out_dir / "series.csv"),
        write_json(summary(spec, result, unit), out_dir / "summary.json"),
    ]


def converted_sweep(sweep: SweepResult, unit: TemperatureUnit) -> SweepResult:
    steady = tuple(None if s is None else float(_to_unit(s, unit)) for s in sweep.steady)
    return SweepResult(sweep.parameter, sweep.values, steady, sweep.steady_times)


def sweep_summary(
    spec: ScenarioSpec,
    sweep: SweepResult,
    unit: TemperatureUnit,
    target: Optional[float] = None,
) -> Dict[str, Any]:
    """summary.json content for a sweep; ``target`` is in ``unit``."""
    shown = converted_sweep(sweep, unit)
    data: Dict[str, Any] = {
        "scenario": spec.kind,
        "units": unit.value,
        "parameter": sweep.parameter,
        "values": list(sweep.values),
        "steady_temperature": list(shown.steady),
        "steady_time_s": list(sweep.steady_times),
        "complete": sweep.complete,
        "increasing": sweep.is_increasing(),
        "decreasing": sweep.is_decreasing(),
        "slope": None,
        "intercept": None,
        "r_squared": None,
        "target": target,
        "best_value": None if target is None else shown.best_value(target),
    }
    if sum(s is not None for s in sweep.steady) >= 2:
        slope, intercept, r_squared = shown.affine_fit()
        data.update(slope=slope, intercept=intercept, r_squared=r_squared)
    return data


def write_sweep(
    spec: ScenarioSpec,
    sweep: SweepResult,
    out_dir: Path,
    unit: TemperatureUnit,
    target: Optional[float] = None,
) -> list:
    """Write sweep.csv and summary.json."""
    return [
        write_csv(converted_sweep(sweep, unit).to_frame(), out_dir / "sweep.csv"),
        write_json(sweep_summary(spec, sweep, unit, target), out_dir / "summary.json"),
    ]


def design_report(spec: ScenarioSpec, design: DepthDesign, unit: TemperatureUnit) -> Dict[str, Any]:
    data: Dict[str, Any] = {
        "scenario": spec.kind,
        "units": unit.value,
        "target": float(_to_unit(design.target, unit)),
        "tolerance": float(convert_difference(design.tolerance, TemperatureUnit.CELSIUS, unit)),
        "water_depth_m": design.water_depth,
        "steady_temperature": float(_to_unit(design.steady_temperature, unit)),
        "level_rise_m": design.level_rise,
        "total_depth_m": design.total_depth,
        "footprint_m2": design.footprint,
        "iterations": design.iterations,
        "evaluations": design.evaluations,
        "tub": None if design.tub is None else asdict(design.tub),
        "faucet": None,
    }
    if design.faucet is not None:
        faucet = design.faucet
        data["faucet"] = {
            "q_maintain_W": faucet.q_maintain,
            "q_wall_W": faucet.q_wall,
            "q_supply_W": faucet.q_supply,
            "velocity_m_s": faucet.velocity,
        }
    return data


def write_design(
    spec: ScenarioSpec, design: DepthDesign, out_dir: Path, unit: TemperatureUnit
) -> list:
    return [write_json(design_report(spec, design, unit), out_dir / "design.json")]
