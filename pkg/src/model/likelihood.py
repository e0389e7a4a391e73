"""Single-hit Bernoulli likelihood pieces.

A household with rate eta is infected with probability 1 - exp(-eta). Repeated
observations of one household share eta, so the likelihood is evaluated on
per-household positive and negative counts.
"""

import math
from typing import Tuple

import numpy as np

LOG_TWO = math.log(2.0)


def log1mexp(eta):
    """log(1 - exp(-eta)) for eta >= 0, stable at both ends."""
    eta = np.asarray(eta, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(eta < LOG_TWO, np.log(-np.expm1(-eta)), np.log1p(-np.exp(-eta)))
    return out if out.ndim else float(out)


def infection_prob(eta):
    """1 - exp(-eta) in complementary form."""
    eta = np.asarray(eta, dtype=float)
    p = -np.expm1(-eta)
    return p if p.ndim else float(p)


def per_obs_rate(baseline, exposure, covariates, gamma):
    """exp(gamma'x) * (baseline + exposure), elementwise over households."""
    covariates = np.asarray(covariates, dtype=float)
    gamma = np.asarray(gamma, dtype=float)
    susceptibility = np.exp(covariates @ gamma) if gamma.size else np.ones(np.shape(exposure))
    return susceptibility * (np.asarray(baseline, dtype=float) + np.asarray(exposure, dtype=float))


def bernoulli_terms(
    eta: np.ndarray, positives: np.ndarray, negatives: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Per-household log-likelihood and its derivative in eta.

    pos * log(1 - exp(-eta)) - neg * eta and pos / expm1(eta) - neg. A
    household with no positives contributes no log1mexp term, so eta = 0 is
    only fatal when a positive was observed there.
    """
    eta = np.asarray(eta, dtype=float)
    has_pos = positives > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        value = np.where(has_pos, positives * log1mexp(np.maximum(eta, 0.0)), 0.0) - negatives * eta
        slope = np.where(has_pos, positives / np.expm1(eta), 0.0) - negatives
    return value, slope


def observation_log_pmf(eta: float, outcome: int) -> float:
    """Log-pmf of one observation, without count aggregation."""
    if outcome:
        return float(log1mexp(eta))
    return -float(eta)
