"""
Command Line Interface

    bathtub-sim run <config.json> -o <dir>
    bathtub-sim sweep <config.json> --param {depth|k|Q} --values v1,v2 [--target <temp>] -o <dir>
    bathtub-sim design <config.json> --target <temp> --tol <deg> -o <dir>
    bathtub-sim check-stability <config.json>

Every failure exits nonzero and writes one JSON line to stderr.
"""

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Sequence
import argparse
import json
import logging
import sys

from .config import load_config, serialize_config
from .core import TemperatureUnit, convert_difference, convert_temperature
from .exceptions import (
    BlowUpError,
    BracketError,
    ConfigError,
    DomainError,
    StabilityError,
    SteadyStateNotReached,
)
from .output import write_design, write_json, write_run, write_sweep
from .scenarios import (
    ScenarioSpec,
    continuous_source_1d,
    design_depth,
    local_add_1d,
    local_add_cooling_1d,
    simulate,
    surface_cooling_2d,
    sweep,
)
from .solver import check_stability

logger = logging.getLogger(__name__)

COMMANDS = ("run", "sweep", "design", "check-stability")

# (error kind, exit code), most specific first
EXIT_CODES = [
    (ConfigError, "config", 1),
    (StabilityError, "stability", 2),
    (BlowUpError, "blowup", 3),
    (BracketError, "search", 4),
    (SteadyStateNotReached, "search", 4),
    (DomainError, "config", 1),
    (OSError, "io", 1),
]

RUNNERS = {
    "surface_cooling_2d": surface_cooling_2d,
    "local_add_1d": local_add_1d,
    "local_add_cooling_1d": local_add_cooling_1d,
}

# Comfortable soaking band 100-102 °F
DEFAULT_TARGET_F = 101.0
DEFAULT_TOLERANCE_F = 1.0


@dataclass
class RunManifest:
    """What a command read, where it wrote, and how it ended."""

    config_path: Optional[str]
    spec: ScenarioSpec
    out_dir: Optional[Path]
    files: List[str] = field(default_factory=list)
    exit_status: int = 0

    def to_dict(self) -> dict:
        return {
            "config_path": self.config_path,
            "scenario": json.loads(serialize_config(self.spec)),
            "out_dir": None if self.out_dir is None else str(self.out_dir),
            "files": list(self.files),
            "exit_status": self.exit_status,
        }


def _make_dir(path: Path) -> None:
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {path}: {exc.strerror}", "out") from exc


def _finish(manifest: RunManifest, paths: Sequence[Path]) -> RunManifest:
    manifest.files = [p.name for p in paths] + ["manifest.json"]
    write_json(manifest.to_dict(), manifest.out_dir / "manifest.json")
    return manifest


def execute(
    spec: ScenarioSpec,
    command: str,
    out_dir: Optional[Path] = None,
    config_path: Optional[str] = None,
    units: Optional[TemperatureUnit] = None,
    allow_unstable: bool = False,
    jobs: int = 1,
    progress: bool = False,
    param: Optional[str] = None,
    values: Optional[Sequence[float]] = None,
    target: Optional[float] = None,
    tolerance: Optional[float] = None,
) -> RunManifest:
    """
    Dispatch one command and write its files.

    Parameters
    ----------
    spec : ScenarioSpec
        Parsed configuration
    command : str
        ``run``, ``sweep``, ``design`` or ``check-stability``
    out_dir : Path, optional
        Output directory (created on demand); unused by ``check-stability``
    units : TemperatureUnit, optional
        Output unit, by default the document's unit
    target : float, optional
        Sweep or design target in the output unit, by default 101 °F
    tolerance : float, optional
        Design tolerance in degrees of the output unit, by default 1 °F

    Returns
    -------
    RunManifest
        Emitted files and exit status

    Raises
    ------
    StabilityError, BlowUpError, BracketError, SteadyStateNotReached,
    ConfigError
        Mapped to exit codes by ``main``; a blow-up still writes the
        partial result before raising
    """
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    unit = units or spec.units
    if allow_unstable:
        spec = replace(spec, solver=replace(spec.solver, allow_unstable=True))
    manifest = RunManifest(config_path, spec, None if out_dir is None else Path(out_dir))

    limit, passed = check_stability(spec.effective_material(), spec.grid, spec.solver.dt)
    if command == "check-stability":
        manifest.exit_status = 0 if passed else 2
        return manifest
    if not passed and not allow_unstable:
        raise StabilityError(spec.solver.dt, limit)
    if manifest.out_dir is None:
        raise ConfigError("an output directory is required", "out_dir")

    if command == "run":
        runner = RUNNERS.get(spec.kind, simulate)
        try:
            result = runner(spec)
        except BlowUpError as exc:
            if exc.result is not None:
                _make_dir(manifest.out_dir)
                manifest.exit_status = 3
                _finish(manifest, write_run(spec, exc.result, manifest.out_dir, unit))
            raise
        _make_dir(manifest.out_dir)
        return _finish(manifest, write_run(spec, result, manifest.out_dir, unit))

    if target is None:
        target = float(convert_temperature(DEFAULT_TARGET_F, TemperatureUnit.FAHRENHEIT, unit))

    if command == "sweep":
        if param is None or not values:
            raise ConfigError("sweep needs --param and --values")
        if param == "Q" and spec.kind == "continuous_source_1d":
            result = continuous_source_1d(spec, values, jobs=jobs, progress=progress)
        else:
            result = sweep(spec, param, values, jobs=jobs, progress=progress)
        _make_dir(manifest.out_dir)
        return _finish(manifest, write_sweep(spec, result, manifest.out_dir, unit, target))

    # design
    if tolerance is None:
        tolerance = convert_difference(DEFAULT_TOLERANCE_F, TemperatureUnit.FAHRENHEIT, unit)
    target_c = float(convert_temperature(target, unit, TemperatureUnit.CELSIUS))
    tolerance_k = float(convert_difference(tolerance, unit, TemperatureUnit.CELSIUS))
    design = design_depth(spec, target_c, tolerance_k, jobs=jobs)
    _make_dir(manifest.out_dir)
    return _finish(manifest, write_design(spec, design, manifest.out_dir, unit))


class _Parser(argparse.ArgumentParser):
    """Argument errors become config errors (exit 1) instead of exit 2."""

    def error(self, message):
        raise ConfigError(message, "argv")


def _values(text: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected comma separated numbers, got {text!r}", "--values") from exc


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--units", choices=["C", "F"], help="Output temperature unit")
    common.add_argument("--allow-unstable", action="store_true",
                        help="Run even when dt exceeds the stability limit")
    common.add_argument("--jobs", type=int, default=1, help="Worker processes for sweeps")
    common.add_argument("--progress", action="store_true", help="Show a progress bar")
    common.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    parser = _Parser(prog="bathtub-sim", description="Bathtub heat-conduction simulator")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", parents=[common], help="Run a scenario")
    run.add_argument("config")
    run.add_argument("-o", "--out", required=True)

    sweep_cmd = commands.add_parser("sweep", parents=[common], help="Steady temperature sweep")
    sweep_cmd.add_argument("config")
    sweep_cmd.add_argument("--param", required=True, choices=["depth", "k", "Q"])
    sweep_cmd.add_argument("--values", required=True, type=_values)
    sweep_cmd.add_argument("--target", type=float, help="Temperature the recommended value should hold")
    sweep_cmd.add_argument("-o", "--out", required=True)

    design = commands.add_parser("design", parents=[common], help="Search the water depth")
    design.add_argument("config")
    design.add_argument("--target", type=float, help="Target steady temperature")
    design.add_argument("--tol", type=float, help="Accepted deviation in degrees")
    design.add_argument("-o", "--out", required=True)

    check = commands.add_parser("check-stability", parents=[common],
                                help="Print the stability limit without simulating")
    check.add_argument("config")
    return parser


def _report_error(exc: Exception) -> int:
    for cls, kind, code in EXIT_CODES:
        if isinstance(exc, cls):
            line = {"error": kind, "exit_code": code, "message": str(exc)}
            sys.stderr.write(json.dumps(line) + "\n")
            return code
    raise exc


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Console entry point; returns the process exit code."""
    try:
        args = build_parser().parse_args(argv)
    except ConfigError as exc:
        return _report_error(exc)

    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    units = TemperatureUnit.parse(args.units) if args.units else None
    try:
        spec = load_config(args.config)
        manifest = execute(
            spec,
            args.command,
            out_dir=getattr(args, "out", None),
            config_path=args.config,
            units=units,
            allow_unstable=args.allow_unstable,
            jobs=args.jobs,
            progress=args.progress,
            param=getattr(args, "param", None),
            values=getattr(args, "values", None),
            target=getattr(args, "target", None),
            tolerance=getattr(args, "tol", None),
        )
    except (ConfigError, StabilityError, BlowUpError, BracketError,
            SteadyStateNotReached, DomainError, OSError) as exc:
        return _report_error(exc)

    if args.command == "check-stability":
        limit, passed = check_stability(
            manifest.spec.effective_material(), manifest.spec.grid, manifest.spec.solver.dt
        )
        print(f"dt_s={manifest.spec.solver.dt:g}")
        print(f"dt_stable_max_s={limit:g}")
        print("PASS" if passed else "FAIL")
        if not passed:
            return _report_error(StabilityError(manifest.spec.solver.dt, limit))
        return 0

    print(manifest.out_dir / "manifest.json")
    return manifest.exit_status


if __name__ == "__main__":
    sys.exit(main())
