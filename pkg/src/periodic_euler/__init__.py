"""Time-periodic supersonic flow of isentropic gas in a duct with periodic forcing.

Two independent solvers (space marching in Riemann invariants and a
finite-volume scheme in conserved variables) plus diagnostics of the
periodicity, deviation and growth properties of the computed fields.
"""
__version__ = "0.1.0"

from .boundary import BoundaryData, PeriodicSignal
from .errors import (
    CFLError,
    ConfigError,
    DomainError,
    EulerError,
    NonFiniteError,
    PositivityError,
    SolverError,
    SupersonicityLoss,
    ValidationError,
    WindowTooShort,
)
from .field import Field
from .forcing import BackgroundSolution, ForcingCoefficient
from .fv import FvGrid, fv_run
from .gasdyn import GasParams, PrimitiveState, RiemannPair
from .march import MarchGrid, march, report_lambda0

__all__ = [
    "BackgroundSolution", "BoundaryData", "CFLError", "ConfigError", "DomainError", "EulerError",
    "Field", "ForcingCoefficient", "FvGrid", "GasParams", "MarchGrid", "NonFiniteError",
    "PeriodicSignal", "PositivityError", "PrimitiveState", "RiemannPair", "SolverError",
    "SupersonicityLoss", "ValidationError", "WindowTooShort", "fv_run", "march", "report_lambda0",
]
