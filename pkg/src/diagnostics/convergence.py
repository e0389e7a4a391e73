"""Rank-normalized split R-hat and bulk/tail effective sample sizes.

Inputs are (chains, draws) arrays for one parameter. Results that are
undefined (no variation to measure) are returned as None.
"""

import math
from typing import Optional

import numpy as np
from scipy import stats

TAIL_PROBS = (0.05, 0.95)
MIN_DRAWS = 4


def _as_chains(ary) -> np.ndarray:
    ary = np.asarray(ary, dtype=float)
    if ary.ndim == 1:
        ary = ary[None, :]
    if ary.ndim != 2:
        raise ValueError("draws must be a (chains, draws) array")
    if ary.shape[1] < MIN_DRAWS:
        raise ValueError(f"each chain needs at least {MIN_DRAWS} draws")
    return ary


def z_scale(ary) -> np.ndarray:
    """Pooled ranks mapped through the normal quantile, offset (r - 3/8)/(n + 1/4)."""
    ary = np.asarray(ary, dtype=float)
    ranks = stats.rankdata(ary, method="average", axis=None).reshape(ary.shape)
    return stats.norm.ppf((ranks - 0.375) / (ary.size + 0.25))


def split_chains(ary) -> np.ndarray:
    """Split every chain into halves; an odd middle draw is dropped."""
    ary = np.asarray(ary)
    half = ary.shape[1] // 2
    return np.vstack((ary[:, :half], ary[:, -half:]))


def _is_constant(ary: np.ndarray) -> bool:
    return bool(np.all(ary == ary.flat[0]))


def _rhat(ary: np.ndarray) -> Optional[float]:
    n = ary.shape[1]
    within = float(np.mean(np.var(ary, axis=1, ddof=1)))
    if within <= 0.0:
        return None
    between = n * float(np.var(np.mean(ary, axis=1), ddof=1))
    return math.sqrt((within * (n - 1) / n + between / n) / within)


def split_rhat_rank_normalized(ary) -> Optional[float]:
    """R-hat of rank-normalized split chains; None when every chain is constant."""
    ary = _as_chains(ary)
    split = split_chains(ary)
    if float(np.max(np.var(split, axis=1))) == 0.0:
        return None
    return _rhat(z_scale(split))


def autocovariance(x: np.ndarray) -> np.ndarray:
    """Biased autocovariance at every lag by direct correlation."""
    x = np.asarray(x, dtype=float)
    centered = x - x.mean()
    n = centered.size
    return np.correlate(centered, centered, mode="full")[n - 1:] / n


def _ess(ary: np.ndarray) -> Optional[float]:
    n_chain, n_draw = ary.shape
    acov = np.stack([autocovariance(chain) for chain in ary])
    mean_var = float(np.mean(acov[:, 0])) * n_draw / (n_draw - 1.0)
    var_plus = mean_var * (n_draw - 1.0) / n_draw
    if n_chain > 1:
        var_plus += float(np.var(np.mean(ary, axis=1), ddof=1))
    if not var_plus > 0.0:
        return None

    rho = np.zeros(n_draw)
    rho_even = 1.0
    rho[0] = rho_even
    rho_odd = 1.0 - (mean_var - float(np.mean(acov[:, 1]))) / var_plus
    rho[1] = rho_odd

    # initial positive sequence
    t = 1
    while t < n_draw - 3 and rho_even + rho_odd > 0.0:
        rho_even = 1.0 - (mean_var - float(np.mean(acov[:, t + 1]))) / var_plus
        rho_odd = 1.0 - (mean_var - float(np.mean(acov[:, t + 2]))) / var_plus
        if rho_even + rho_odd >= 0.0:
            rho[t + 1] = rho_even
            rho[t + 2] = rho_odd
        t += 2
    max_t = t - 2
    if rho_even > 0.0:
        rho[max_t + 1] = rho_even

    # initial monotone sequence
    t = 1
    while t <= max_t - 2:
        if rho[t + 1] + rho[t + 2] > rho[t - 1] + rho[t]:
            rho[t + 1] = (rho[t - 1] + rho[t]) / 2.0
            rho[t + 2] = rho[t + 1]
        t += 2

    total = n_chain * n_draw
    tau = -1.0 + 2.0 * float(np.sum(rho[: max_t + 1])) + float(np.sum(rho[max_t + 1: max_t + 2]))
    # caps ESS at N log10 N
    tau = max(tau, 1.0 / math.log10(total))
    return float(total / tau)


def ess_bulk(ary) -> Optional[float]:
    """ESS of rank-normalized split chains."""
    ary = _as_chains(ary)
    if _is_constant(ary):
        return None
    return _ess(z_scale(split_chains(ary)))


def _ess_quantile(ary: np.ndarray, prob: float) -> Optional[float]:
    threshold = np.quantile(ary, prob)
    indicator = (ary <= threshold).astype(float)
    split = split_chains(indicator)
    if _is_constant(split):
        return None
    return _ess(z_scale(split))


def ess_tail(ary) -> Optional[float]:
    """Smaller of the 5% and 95% quantile-indicator ESS."""
    ary = _as_chains(ary)
    if _is_constant(ary):
        return None
    values = [_ess_quantile(ary, p) for p in TAIL_PROBS]
    if any(v is None for v in values):
        return None
    return min(values)
