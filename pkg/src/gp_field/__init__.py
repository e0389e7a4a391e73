"""
Gaussian process field module for hazardfield.

Exponentiated-quadratic covariances on the partitioned network, the
intersection-constrained prior construction, and its non-centered transform.
"""

from .kernels import (
    GpHyperparams,
    jittered_cholesky,
    scaled_lengthscale,
    segment_cholesky,
    segment_cov_matrix,
    sqexp_cov,
    sqexp_cov_domega,
)
from .flow import Anchor, FlowGraph, Upstream
from .construction import (
    FieldTransform,
    LatentField,
    conditional_segment_dist,
    cross_covariance,
    gp_conditional_on_point,
    intersection_value_dist,
    log_prior_density,
    sample_prior_field,
)

__all__ = [
    # Covariances
    'GpHyperparams',
    'sqexp_cov',
    'sqexp_cov_domega',
    'segment_cov_matrix',
    'segment_cholesky',
    'jittered_cholesky',
    'scaled_lengthscale',

    # Flow ordering
    'Anchor',
    'FlowGraph',
    'Upstream',

    # Constrained construction
    'LatentField',
    'FieldTransform',
    'intersection_value_dist',
    'conditional_segment_dist',
    'cross_covariance',
    'gp_conditional_on_point',
    'sample_prior_field',
    'log_prior_density',
]
