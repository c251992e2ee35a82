"""Structured exceptions for yamabe-nodal.

Every error carries a human-readable message plus a ``context`` dict with
the offending values, so the CLI can print a diagnostic and callers can
inspect what went wrong without parsing strings.
"""

from typing import Any


class YamabeError(Exception):
    """Base class for all library errors."""

    def __init__(self, message: str, context: dict[str, Any] | None = None):
        super().__init__(message)
        self.message = message
        self.context = context or {}

    def __str__(self) -> str:
        if not self.context:
            return self.message
        details = ", ".join(f"{k}={v!r}" for k, v in self.context.items())
        return f"{self.message} ({details})"


class DimensionError(YamabeError):
    """Raised when dimensions are out of range or do not match."""


class SingularityError(YamabeError):
    """Raised when an evaluation hits a coordinate or power singularity."""


class AssumptionViolation(YamabeError):
    """Raised when a group or orbit breaks a structural assumption."""


class DegenerateBubbleError(YamabeError):
    """Raised for β ≤ 1 or β too close to 1 to evaluate in double precision."""


class QuadratureError(YamabeError):
    """Raised when a quadrature rule fails calibration or meets a bad node."""


class ConfigError(YamabeError):
    """Raised for unreadable or invalid configuration input."""
