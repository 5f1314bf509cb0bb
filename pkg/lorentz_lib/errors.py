"""
Errors module for Lorentz Lab
-----------------------------

Exception hierarchy shared by the numerical modules and the CLI, plus the
mapping from exceptions to process exit statuses.
"""

from typing import Any, Optional, Sequence

# Exit statuses
EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_CONFIGURATION = 2
EXIT_INTEGRATOR_ABORT = 3


class LorentzLabError(Exception):
    """Base class for all Lorentz Lab errors."""


class DomainError(LorentzLabError, ValueError):
    """An argument lies outside the domain of an operation."""


class StructuralError(LorentzLabError):
    """A matrix does not have the required algebraic structure."""

    def __init__(self, message: str, max_deviation: float, tolerance: float):
        super().__init__(
            f"{message} (max deviation {max_deviation:.3e} > tolerance {tolerance:.3e})"
        )
        self.max_deviation = max_deviation
        self.tolerance = tolerance


class FieldEvaluationError(LorentzLabError):
    """A field map produced a non-finite field."""

    def __init__(self, message: str, position: Sequence[float]):
        coords = ", ".join(f"{c:.17g}" for c in position)
        super().__init__(f"{message} at position ({coords})")
        self.position = tuple(position)


class ConfigurationError(LorentzLabError):
    """Inconsistent run configuration."""


class ScenarioParseError(ConfigurationError):
    """A scenario document could not be parsed."""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(f"{key}: {message}" if key else message)
        self.key = key


class IntegratorAbort(LorentzLabError):
    """The integrator left the mass shell beyond the abort threshold."""

    def __init__(self, step: int, tau: float, defect: float, stepper: str):
        super().__init__(
            f"{stepper} integration aborted at step {step} (tau={tau:.6g}): "
            f"mass-shell defect {defect:.3e}"
        )
        self.step = step
        self.tau = tau
        self.defect = defect
        self.stepper = stepper


def exit_status(error: Any) -> int:
    """Map an exception to the CLI exit status."""
    if isinstance(error, IntegratorAbort):
        return EXIT_INTEGRATOR_ABORT
    if isinstance(error, (ConfigurationError, DomainError, StructuralError)):
        return EXIT_CONFIGURATION
    if isinstance(error, FieldEvaluationError):
        return EXIT_INTEGRATOR_ABORT
    return EXIT_CONFIGURATION
