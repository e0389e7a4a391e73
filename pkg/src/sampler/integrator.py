"""Phase-space points and the leapfrog integrator under a diagonal metric."""

import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from src.utils.exceptions import NumericalError

DensityGradient = Callable[[np.ndarray], Tuple[float, np.ndarray]]


@dataclass(frozen=True, eq=False)
class PhasePoint:
    """Position, momentum, log density and its gradient."""

    q: np.ndarray
    p: np.ndarray
    logp: float
    grad: np.ndarray

    def kinetic(self, inv_mass: np.ndarray) -> float:
        return 0.5 * float(self.p @ (inv_mass * self.p))

    def hamiltonian(self, inv_mass: np.ndarray) -> float:
        h = -self.logp + self.kinetic(inv_mass)
        return math.inf if math.isnan(h) else h

    def velocity(self, inv_mass: np.ndarray) -> np.ndarray:
        return inv_mass * self.p

    def with_momentum(self, p: np.ndarray) -> "PhasePoint":
        return PhasePoint(self.q, p, self.logp, self.grad)


def evaluate(target: DensityGradient, q: np.ndarray) -> Tuple[float, np.ndarray]:
    """Log density and gradient, or (-inf, nan) where the target is unusable.

    Non-finite positions, values or gradients and numerical failures inside
    the target all map to -inf so the caller sees a divergence.
    """
    bad = (-math.inf, np.full(q.shape, np.nan))
    if not np.all(np.isfinite(q)):
        return bad
    try:
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            logp, grad = target(q)
    except (NumericalError, ValueError, FloatingPointError, OverflowError):
        return bad
    logp = float(logp)
    grad = np.asarray(grad, dtype=float)
    if not math.isfinite(logp) or not np.all(np.isfinite(grad)):
        return bad
    return logp, grad


def leapfrog(
    point: PhasePoint, step_size: float, inv_mass: np.ndarray, target: DensityGradient
) -> PhasePoint:
    """One velocity-Verlet step; a negative step integrates backwards."""
    p_half = point.p + 0.5 * step_size * point.grad
    q_new = point.q + step_size * inv_mass * p_half
    logp, grad = evaluate(target, q_new)
    p_new = p_half + 0.5 * step_size * grad
    return PhasePoint(q_new, p_new, logp, grad)
