"""Exception hierarchy shared by all modules.

The CLI maps these onto its exit-code contract: 1 for I/O and parsing,
2 for domain/validation/identifiability, 3 for convergence failures.
"""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ToolkitError, ValueError):
    """An argument is outside the physical or contractual domain."""


class ValidationError(ToolkitError, ValueError):
    """A constructed value violates its invariants."""


class ConfigurationError(ToolkitError, ValueError):
    """A configuration document or registry entry is unusable."""


class ParseError(ToolkitError):
    """A data file could not be parsed; carries the offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConvergenceError(ToolkitError):
    """An iterative computation exhausted its budget.

    ``partial`` carries the best available result, when one exists.
    """

    def __init__(self, message: str, partial=None):
        self.partial = partial
        super().__init__(message)


class IdentifiabilityError(ToolkitError, ValueError):
    """A fit design cannot separate the requested parameters."""


class FitError(ToolkitError):
    """A least-squares fit failed to converge."""
