"""
Exception hierarchy shared by the library modules and the CLI.
"""

from typing import Any, Dict, Optional


class ComplementarityError(Exception):
    """Base class for every error raised by this project."""


class SpinDomainError(ComplementarityError, ValueError):
    """An input lies outside the domain of the requested operation."""


class ConfigError(ComplementarityError, ValueError):
    """A run configuration file or preset is malformed."""


class InvariantViolationError(ComplementarityError):
    """A computed object does not satisfy its type invariants."""


class ClosedFormBreakdownError(InvariantViolationError):
    """A closed-form distribution went negative for the given parameters."""

    def __init__(self, message: str, parameters: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.parameters = parameters or {}


class PropertyViolationError(ComplementarityError):
    """An asserted physical or information-theoretic property failed."""


class BoundFalsificationError(PropertyViolationError):
    """A verification sample exceeded a searched knowledge bound."""

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None, excess: float = 0.0):
        super().__init__(message)
        self.witness = witness or {}
        self.excess = excess


class NumericalInstabilityError(ComplementarityError):
    """The fixed-step integrator drifted beyond its trace tolerance."""

    def __init__(self, message: str, suggested_steps: int):
        super().__init__(message)
        self.suggested_steps = suggested_steps
