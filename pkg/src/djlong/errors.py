"""Exception hierarchy shared by all solver modules."""

from __future__ import annotations


class DjlongError(Exception):
    """Base class for every error raised by the package."""


class DomainError(DjlongError, ValueError):
    """An input lies outside the set on which an operation is defined."""


class PreconditionError(DjlongError, ValueError):
    """A documented precondition of an oracle or verifier does not hold."""


class SheetPointError(DomainError):
    """A vortex-sheet field was evaluated exactly on the sheet."""


class NumericalError(DjlongError, ArithmeticError):
    """A numerical kernel failed to reach its tolerance.

    ``estimate`` carries the achieved error estimate when one is available.
    """

    def __init__(self, message: str, estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate


class BracketError(NumericalError):
    """No sign change was found within the bracket expansion budget."""


class NonConvergence(NumericalError):
    """An iterative solver stalled; ``estimate`` is the last residual."""


class MaximumPrincipleViolation(NumericalError):
    """A converged singular iterate is not positive on the interior."""
