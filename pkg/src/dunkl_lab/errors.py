"""Exception types shared across the package."""

from __future__ import annotations


class DunklLabError(Exception):
    """Base class for all package-specific errors."""


class DimensionError(DunklLabError):
    """Vectors or matrices with incompatible dimensions."""


class InvalidRootError(DunklLabError):
    """A root vector that cannot be used (zero vector, bad data)."""


class UnsupportedFamilyError(DunklLabError):
    """Unknown family name or unsupported rank/parameter combination."""


class ExactModeError(DunklLabError):
    """Irrational or floating-point data fed to an exact-arithmetic path."""


class HyperplaneError(DunklLabError):
    """Evaluation point too close to a reflecting hyperplane."""


class SamplingError(DunklLabError):
    """Generic-point sampling failed (requested margin too large)."""


class DegreeCapError(DunklLabError):
    """Polynomial operation would exceed the configured degree cap."""


class PolynomialDivisionError(DunklLabError):
    """Exact polynomial division left a nonzero remainder."""


class StepUnderflowError(DunklLabError):
    """Adaptive time step fell below the floor near a collision.

    Attributes:
        time: simulation time at which the underflow occurred.
    """

    def __init__(self, message: str, time: float):
        super().__init__(message)
        self.time = time


class ConfigError(DunklLabError):
    """Invalid run configuration (schema violation, bad flag values)."""
