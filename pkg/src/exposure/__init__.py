"""
Exposure module for hazardfield.

Distance kernels, the discretized exposure sum, the quadrature oracle for
exact exposure, and the discretization-error bound.
"""

from .kernels import (
    EXPONENTIAL,
    GAUSSIAN,
    KERNEL_KINDS,
    DistanceKernel,
    kernel_eval,
    kernel_log_bandwidth_derivative,
)
from .discretized import (
    ExposureTables,
    build_exposure_tables,
    discretized_exposure,
    discretized_exposure_all,
    segment_exposures,
)
from .quadrature import quadrature_exposure, true_total_exposure
from .error_bound import ErrorBound, discretization_error_bound, local_variation

__all__ = [
    # Kernels
    'DistanceKernel',
    'EXPONENTIAL',
    'GAUSSIAN',
    'KERNEL_KINDS',
    'kernel_eval',
    'kernel_log_bandwidth_derivative',

    # Discretized exposure
    'ExposureTables',
    'build_exposure_tables',
    'segment_exposures',
    'discretized_exposure',
    'discretized_exposure_all',

    # Exact exposure
    'quadrature_exposure',
    'true_total_exposure',

    # Error bound
    'ErrorBound',
    'discretization_error_bound',
    'local_variation',
]
