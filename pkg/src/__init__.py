"""
Bathtub Heat Simulation Package

Explicit finite-difference simulation of bathtub water temperature with
surface cooling, wall losses and heat injection, plus the lumped wall,
faucet and depth design calculations built on it.
"""

__version__ = "1.0.0"

from . import exceptions
from . import core
from . import physics
from . import solver
from . import scenarios
from . import config
from . import output
from . import cli

__all__ = [
    "exceptions",
    "core",
    "physics",
    "solver",
    "scenarios",
    "config",
    "output",
    "cli",
]
