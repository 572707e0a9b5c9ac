"""
Error hierarchy

Exceptions raised by the simulation engine. The CLI maps each class to
an exit code (see ``src.cli.EXIT_CODES``).
"""

from typing import Optional


class SimulationError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SimulationError, ValueError):
    """
    Malformed or invalid configuration.

    Parameters
    ----------
    message : str
        Human readable reason
    path : Optional[str], optional
        Dotted path of the offending field (e.g. ``material.rho``)
    """

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class DomainError(SimulationError, ValueError):
    """Argument outside the domain of a closed-form formula."""


class StabilityError(SimulationError):
    """Time step above the explicit stability limit."""

    def __init__(self, dt: float, limit: float):
        self.dt = dt
        self.limit = limit
        super().__init__(
            f"dt={dt:g} s exceeds the stability limit {limit:g} s"
        )


class BlowUpError(SimulationError, ArithmeticError):
    """
    Non-finite or divergent temperatures produced by a step.

    The partial ``result`` (when the error comes from a run) holds every
    snapshot and series row recorded before the failing step.
    """

    def __init__(self, step: int, time: float, result=None):
        self.step = step
        self.time = time
        self.result = result
        super().__init__(f"solution blew up at step {step} (t={time:g} s)")


class BracketError(SimulationError, ValueError):
    """Design target lies outside the range spanned by the search bounds."""


class SteadyStateNotReached(SimulationError):
    """A run ended before the steady-state criterion was met."""
