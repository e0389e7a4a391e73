"""Distance kernels: the probability that a pathogen travels a distance."""

from dataclasses import dataclass

import numpy as np

EXPONENTIAL = "exponential"
GAUSSIAN = "gaussian"
KERNEL_KINDS = (EXPONENTIAL, GAUSSIAN)


@dataclass(frozen=True)
class DistanceKernel:
    """Monotone decreasing kernel K(d / rho) with K(0) = 1."""

    kind: str = EXPONENTIAL
    bandwidth: float = 0.1

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ValueError(f"kind must be one of {KERNEL_KINDS}")
        if not self.bandwidth > 0:
            raise ValueError("bandwidth must be positive")

    def with_bandwidth(self, bandwidth: float) -> "DistanceKernel":
        return DistanceKernel(self.kind, bandwidth)


def kernel_eval(kernel: DistanceKernel, d):
    """Kernel weight at distance d (km), elementwise."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0):
        raise ValueError("distances must be non-negative")
    x = d / kernel.bandwidth
    if kernel.kind == EXPONENTIAL:
        return np.exp(-x)
    return np.exp(-x * x)


def kernel_log_bandwidth_derivative(kernel: DistanceKernel, d, weights=None):
    """rho * dK/drho: K d/rho (exponential) or 2 K (d/rho)^2 (gaussian)."""
    d = np.asarray(d, dtype=float)
    if weights is None:
        weights = kernel_eval(kernel, d)
    x = d / kernel.bandwidth
    if kernel.kind == EXPONENTIAL:
        return weights * x
    return 2.0 * weights * x * x
