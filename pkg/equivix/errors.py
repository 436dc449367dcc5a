# equivix/errors.py
"""Exception hierarchy shared by the library and the CLI."""

from typing import Any, Optional


class EquivixError(Exception):
    """Base class for all equivix errors."""
    pass


class InvalidDimensionError(EquivixError, ValueError):
    """Raised for non-positive or inconsistent dimensions and index ranges."""
    pass


class PreconditionError(EquivixError, ValueError):
    """Raised when an operation's documented precondition does not hold."""
    pass


class UnsupportedShapeError(PreconditionError):
    """Raised for symbols whose fiber shape the operation cannot handle."""
    pass


class WrongMethodError(PreconditionError):
    """Raised when the chosen index method does not match the fixed-point dimension."""
    pass


class NonIdempotentError(PreconditionError):
    """Raised when a projection argument fails the idempotency check."""
    pass


class BasisMismatchError(PreconditionError):
    """Raised when operators built on different bases or hbar values are combined."""
    pass


class UsageError(EquivixError):
    """Raised for malformed command-line input or run manifests."""
    pass


class IllConditionedError(EquivixError, ArithmeticError):
    """Raised when a fixed space or normal determinant is numerically unreliable."""
    pass


class QuadratureError(EquivixError, RuntimeError):
    """Raised when adaptive refinement does not converge."""

    def __init__(self, message: str, diagnostics: Optional[dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
