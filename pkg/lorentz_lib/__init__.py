"""
Lorentz Lab Library Package

This package contains the ambient components of the simulator: logging,
errors, scenario files, output formatting and the verification suite.
Scenario, output and verification modules import the physics package and
are imported by full path to keep the package import light.
"""

__version__ = "1.0.0"

from .errors import (
    ConfigurationError,
    DomainError,
    FieldEvaluationError,
    IntegratorAbort,
    LorentzLabError,
    ScenarioParseError,
    StructuralError,
    exit_status,
)
from .logging import configure_logging, get_logger

__all__ = [
    "ConfigurationError",
    "DomainError",
    "FieldEvaluationError",
    "IntegratorAbort",
    "LorentzLabError",
    "ScenarioParseError",
    "StructuralError",
    "exit_status",
    "configure_logging",
    "get_logger",
]
