"""Useful functions and the error hierarchy."""
from typing import Any, List, Optional

LOGGED_ALREADY = set({})


def first_occurrence(message: str) -> bool:
    """Return True if we haven't logged message already."""
    if message in LOGGED_ALREADY:
        return False
    LOGGED_ALREADY.add(message)
    return True


class ForgeError(Exception):
    """Base class, carries an optional partial report."""

    report: Optional[Any] = None
    results: Optional[List[Any]] = None
    """Observer results finished before the failure."""


class RangeError(ForgeError, ValueError):
    """Argument outside the sampled interval."""


class DomainError(ForgeError, ValueError):
    """Argument outside the domain of a formula."""


class ConfigError(ForgeError):
    """Bad configuration value, file or combination."""


class UsageError(ForgeError):
    """Operation called without the data it needs."""


class PerturbationError(ForgeError):
    """Perturbation produced an invalid profile."""


class IntegrationError(ForgeError):
    """Integrator gave up."""

    def __init__(self, message: str, last_state: Any = None) -> None:
        """Keep the last good state."""
        super().__init__(message)
        self.last_state = last_state


class AccuracyError(ForgeError):
    """A requested accuracy was not reached."""

    def __init__(self, message: str, estimate: float = None) -> None:
        """Keep the achieved estimate."""
        super().__init__(message)
        self.estimate = estimate


class ProfileParseError(ForgeError):
    """Malformed CSV or JSON input."""

    def __init__(self, message: str, line_number: int = None) -> None:
        """Prefix message with line number."""
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class ValidationFailed(ForgeError):
    """Profile violates its invariants."""

    def __init__(self, message: str, violations: List[Any] = None) -> None:
        """Keep the violations."""
        super().__init__(message)
        self.violations = violations or []
