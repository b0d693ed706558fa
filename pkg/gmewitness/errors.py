"""Exception hierarchy for the witness pipeline."""

from __future__ import annotations


class WitnessError(Exception):
    """Base class for all pipeline errors."""


class ConfigValidationError(WitnessError, ValueError):
    """Raised when a run configuration is rejected."""

    def __init__(self, field: str, message: str):
        """Initialize the error.

        Args:
            field: Dotted path of the offending configuration key
            message: Human-readable reason
        """
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


class DimensionGuardError(WitnessError):
    """Raised when a basis, pattern table or enumeration would be too large."""

    def __init__(self, what: str, size: int, limit: int):
        """Initialize the error.

        Args:
            what: Name of the object that exceeded the guard
            size: Requested size
            limit: Configured maximum
        """
        self.what = what
        self.size = size
        self.limit = limit
        super().__init__(f"{what} of size {size} exceeds the limit {limit}")


class ConsistencyError(WitnessError):
    """Raised when a computed probability or state fails a physical check."""
