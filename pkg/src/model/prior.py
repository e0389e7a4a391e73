"""Prior log density on the unconstrained scale, with gradient."""

import math
from typing import Tuple

import numpy as np
from scipy.special import gammaln

from src.model.spec import ModelSpec
from src.model.state import LatentState

HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def _half_normal_log_t(t: float, scale: float) -> Tuple[float, float]:
    # HalfNormal(scale) on exp(t), plus the log-Jacobian t
    x = math.exp(t)
    value = math.log(2.0) - math.log(scale) - HALF_LOG_TWO_PI - 0.5 * (x / scale) ** 2 + t
    return value, 1.0 - (x / scale) ** 2


def _normal(x: np.ndarray, scale: float) -> Tuple[float, np.ndarray]:
    value = float(np.sum(-math.log(scale) - HALF_LOG_TWO_PI - 0.5 * (x / scale) ** 2))
    return value, -x / (scale * scale)


def log_prior(state: LatentState, spec: ModelSpec) -> Tuple[float, np.ndarray]:
    """Log prior density of an unconstrained state and its gradient.

    lambda_b ~ HalfNormal(lambda_scale), or beta_local ~ Normal(0, baseline_scale)
    per group; rho ~ HalfNormal(rho_scale); gamma ~ Normal(0, gamma_scale);
    omega ~ Gamma(shape, rate) when sampled; innovations ~ Normal(0, 1).
    """
    layout = state.layout
    q = state.vector
    grad = np.zeros(layout.dim)
    total = 0.0

    if layout.group_baselines:
        value, g = _normal(q[layout.baseline], spec.baseline_scale)
        total += value
        grad[layout.baseline] = g
    else:
        index = layout.baseline.start
        value, g = _half_normal_log_t(float(q[index]), spec.lambda_scale)
        total += value
        grad[index] = g

    value, g = _half_normal_log_t(float(q[layout.log_rho]), spec.rho_scale)
    total += value
    grad[layout.log_rho] = g

    if layout.n_covariates:
        value, g = _normal(q[layout.gamma], spec.gamma_scale)
        total += value
        grad[layout.gamma] = g

    if layout.log_omega is not None:
        t = float(q[layout.log_omega])
        a, b = spec.omega_shape, spec.omega_rate
        omega = math.exp(t)
        total += a * math.log(b) - float(gammaln(a)) + (a - 1.0) * t - b * omega + t
        grad[layout.log_omega] = a - b * omega

    value, g = _normal(q[layout.innovations], 1.0)
    total += value
    grad[layout.innovations] = g
    return total, grad
