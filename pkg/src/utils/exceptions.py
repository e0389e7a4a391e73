"""
Custom exceptions for hazardfield.

Every error raised on purpose by the library derives from HazardFieldError so
the command-line layer can translate failures into exit codes.
"""

from typing import Optional


class HazardFieldError(Exception):
    """Base exception for all hazardfield errors."""
    pass


class ConfigurationError(HazardFieldError):
    """Raised when a configuration value or network annotation is unusable."""
    pass


class GeometryError(HazardFieldError):
    """Base class for canal geometry failures."""
    pass


class GeometryDomainError(GeometryError):
    """Raised when an arc-length position lies outside its segment."""
    pass


class GeometryConsistencyError(GeometryError):
    """Raised when declared geometry contradicts itself."""
    pass


class DimensionMismatchError(HazardFieldError):
    """Raised when arrays do not match the partition they are used with."""
    pass


class DatasetError(HazardFieldError):
    """Raised when survey data are malformed or unusable."""
    pass


class NumericalError(HazardFieldError):
    """Base class for numerical failures."""
    pass


class CholeskyJitterError(NumericalError):
    """Raised when a covariance cannot be factorized within the jitter cap."""

    def __init__(self, message: str, omega: Optional[float] = None,
                 jitter: Optional[float] = None):
        super().__init__(message)
        self.omega = omega
        self.jitter = jitter


class DegenerateConditioningError(NumericalError):
    """Raised when conditioning on an anchor with zero residual variance."""
    pass


class NonFiniteStateError(NumericalError):
    """Raised when a density is evaluated at a non-finite parameter vector."""
    pass


class QuadratureError(HazardFieldError):
    """Raised when adaptive quadrature misses its tolerance."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class SamplerError(HazardFieldError):
    """Base class for sampler failures."""
    pass


class InitializationError(SamplerError):
    """Raised when no finite starting point is found."""
    pass


class SamplerAbortError(SamplerError):
    """Raised when warmup cannot produce a usable transition."""
    pass


class EstimatorError(HazardFieldError):
    """Raised when fits and truths cannot be paired."""
    pass


class InputOutputError(HazardFieldError):
    """Raised when an input file is missing or unreadable."""
    pass
