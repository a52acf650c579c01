"""Exception types shared by all modules.

Each error class carries the process exit code the command line front end
uses when the error escapes a subcommand.
"""


class HardyOrliczError(Exception):
    """Base class for library errors."""

    exit_code = 1


class DomainError(HardyOrliczError, ValueError):
    """An argument lies outside the domain of the operation."""

    exit_code = 2


class CapacityError(DomainError):
    """A construction would need more memory or levels than allowed."""


class ConvergenceError(HardyOrliczError, RuntimeError):
    """An iterative solver did not reach its tolerance."""

    exit_code = 3


class NumericError(ConvergenceError):
    """A quadrature or floating point evaluation failed."""
