"""Exact canal exposure by adaptive Gauss-Kronrod quadrature.

The integrand K(|l(c) - s| / rho) Lambda(c) is integrated along each segment
with 15-point Gauss-Kronrod rules and adaptive bisection (scipy's quad_vec).
Polyline vertices and the household's projection foot are passed as
breakpoints because the integrand may have kinks there.
"""

from typing import Callable, Mapping

import numpy as np
from scipy.integrate import quad_vec

from src.exposure.kernels import DistanceKernel, kernel_eval
from src.geometry.network import CanalNetwork, CanalSegment
from src.utils.exceptions import ConfigurationError, QuadratureError
from src.utils.logger_config import get_logger

logger = get_logger(__name__)

ABS_TOLERANCE = 1e-10
REL_TOLERANCE = 1e-8
MAX_SUBINTERVALS = 2 ** 12


def quadrature_exposure(
    intensity: Callable[[float], float],
    kernel: DistanceKernel,
    segment: CanalSegment,
    household,
    abs_tol: float = ABS_TOLERANCE,
    rel_tol: float = REL_TOLERANCE,
    max_subintervals: int = MAX_SUBINTERVALS,
) -> float:
    """Integral of kernel-weighted intensity along one segment.

    Raises:
        QuadratureError: If the tolerance is not met within the subinterval cap
    """
    household = np.asarray(household, dtype=float)

    def integrand(c: float) -> float:
        d = float(np.hypot(*(segment.points_at(c) - household)))
        return float(kernel_eval(kernel, d)) * float(intensity(c))

    length = segment.length
    _, foot = segment.project(household)
    breaks = set(float(a) for a in segment.cumulative_arclength[1:-1])
    breaks.add(foot)
    points = sorted(b for b in breaks if 0.0 < b < length)

    estimate, error, info = quad_vec(
        integrand,
        0.0,
        length,
        epsabs=abs_tol,
        epsrel=rel_tol,
        limit=max_subintervals,
        quadrature="gk15",
        points=points or None,
        full_output=True,
    )
    if info.status != 0:
        logger.error(
            f"Quadrature failed on segment '{segment.segment_id}' for household "
            f"{household.tolist()}: {info.message}"
        )
        raise QuadratureError(
            f"quadrature did not converge on segment '{segment.segment_id}': {info.message}",
            estimate=float(estimate),
            error=float(error),
        )
    return float(estimate)


def true_total_exposure(
    network: CanalNetwork,
    intensities: Mapping[str, Callable[[float], float]],
    kernel: DistanceKernel,
    household,
) -> float:
    """Exact cumulative exposure of a household summed over all segments."""
    missing = [sid for sid in network.segment_ids if sid not in intensities]
    if missing:
        raise ConfigurationError(f"no intensity given for segments {missing}")
    return sum(
        quadrature_exposure(intensities[s.segment_id], kernel, s, household)
        for s in network.segments
    )
