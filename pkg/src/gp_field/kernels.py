"""Exponentiated-quadratic covariances and jittered Cholesky factors."""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cholesky

from src.geometry.partition import SegmentPartition
from src.utils.exceptions import CholeskyJitterError, NumericalError
from src.utils.logger_config import get_logger

logger = get_logger(__name__)

JITTER_START = 1e-10
JITTER_CAP = 1e-4
SYMMETRY_TOLERANCE = 1e-12


@dataclass(frozen=True)
class GpHyperparams:
    """Lengthscale (km) and marginal standard deviation of the field."""

    lengthscale: float
    marginal_sd: float = 1.0

    def __post_init__(self):
        if not self.lengthscale > 0:
            raise ValueError("lengthscale must be positive")
        if not self.marginal_sd > 0:
            raise ValueError("marginal_sd must be positive")


def sqexp_cov(d, omega: float, alpha: float = 1.0):
    """alpha^2 exp(-d^2 / (2 omega^2)), elementwise over d."""
    if not omega > 0:
        raise ValueError("omega must be positive")
    d = np.asarray(d, dtype=float)
    return alpha * alpha * np.exp(-0.5 * (d / omega) ** 2)


def sqexp_cov_domega(d, omega: float, alpha: float = 1.0):
    """Derivative of sqexp_cov with respect to omega."""
    d = np.asarray(d, dtype=float)
    return sqexp_cov(d, omega, alpha) * d * d / omega ** 3


def scaled_lengthscale(omega: float, width_target: float, width_reference: float) -> float:
    """Lengthscale rescaled by the ratio of two cell widths."""
    if not (width_target > 0 and width_reference > 0):
        raise ValueError("cell widths must be positive")
    return omega * width_target / width_reference


def centroid_distances(cells: SegmentPartition) -> np.ndarray:
    """Pairwise along-segment distances between cell centroids."""
    arc = cells.centroid_arc
    return np.abs(arc[:, None] - arc[None, :])


def segment_cov_matrix(cells: SegmentPartition, omega: float, alpha: float = 1.0) -> np.ndarray:
    """Prior covariance of a segment's centroid values."""
    return sqexp_cov(centroid_distances(cells), omega, alpha)


def jittered_cholesky(
    matrix: np.ndarray, scale: float = 1.0, omega: Optional[float] = None
) -> Tuple[np.ndarray, float]:
    """Lower Cholesky factor of matrix + jitter * I.

    Jitter starts at 1e-10 * scale and doubles until the factorization
    succeeds.

    Returns:
        (factor, jitter actually added)

    Raises:
        NumericalError: If the matrix is not symmetric
        CholeskyJitterError: If jitter would exceed 1e-4 * scale
    """
    matrix = np.asarray(matrix, dtype=float)
    asymmetry = float(np.max(np.abs(matrix - matrix.T))) if matrix.size else 0.0
    if asymmetry > SYMMETRY_TOLERANCE * max(scale, 1.0):
        raise NumericalError(f"covariance is not symmetric (max asymmetry {asymmetry:.3e})")
    matrix = 0.5 * (matrix + matrix.T)

    eye = np.eye(matrix.shape[0])
    jitter = JITTER_START * scale
    while jitter <= JITTER_CAP * scale:
        try:
            factor = cholesky(matrix + jitter * eye, lower=True, check_finite=False)
        except LinAlgError:
            jitter *= 2.0
            continue
        if jitter > 64 * JITTER_START * scale:
            logger.debug(f"Cholesky needed jitter {jitter:.3e} (omega={omega})")
        return factor, jitter
    raise CholeskyJitterError(
        f"Cholesky failed with jitter up to {JITTER_CAP * scale:.1e} at omega={omega}",
        omega=omega,
        jitter=jitter / 2.0,
    )


def segment_cholesky(cells: SegmentPartition, omega: float, alpha: float = 1.0) -> np.ndarray:
    """Jittered Cholesky factor of segment_cov_matrix."""
    factor, _ = jittered_cholesky(segment_cov_matrix(cells, omega, alpha), alpha * alpha, omega)
    return factor
