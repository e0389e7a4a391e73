"""Multinomial no-U-turn transition with the generalized U-turn criterion.

The trajectory doubles in a random direction until a subtree turns back on
itself, the tree reaches its maximum depth, or the energy error exceeds the
divergence threshold. States are drawn from the trajectory with weights
exp(-H): progressively biased towards the new subtree at the top level and
uniformly within subtrees.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.sampler.integrator import DensityGradient, PhasePoint, leapfrog


@dataclass(frozen=True)
class TransitionStats:
    """Diagnostics of one transition."""

    accept_stat: float
    n_leapfrog: int
    tree_depth: int
    divergent: bool
    energy: float


@dataclass(frozen=True, eq=False)
class _Subtree:
    last: PhasePoint
    proposal: PhasePoint
    log_weight: float
    rho: np.ndarray
    p_begin: np.ndarray
    p_end: np.ndarray
    v_begin: np.ndarray
    v_end: np.ndarray
    valid: bool


def _no_u_turn(v_minus: np.ndarray, v_plus: np.ndarray, rho: np.ndarray) -> bool:
    return float(v_plus @ rho) > 0.0 and float(v_minus @ rho) > 0.0


class _TreeBuilder:
    """Builds subtrees for one transition and tallies its statistics."""

    def __init__(self, target, step_size, inv_mass, h0, max_delta_h, rng):
        self.target = target
        self.step_size = step_size
        self.inv_mass = inv_mass
        self.h0 = h0
        self.max_delta_h = max_delta_h
        self.rng = rng
        self.n_leapfrog = 0
        self.sum_metro_prob = 0.0
        self.divergent = False

    def build(self, start: PhasePoint, depth: int, sign: int) -> _Subtree:
        if depth == 0:
            return self._leaf(start, sign)

        init = self.build(start, depth - 1, sign)
        if not init.valid:
            return init
        final = self.build(init.last, depth - 1, sign)
        if not final.valid:
            return final

        log_weight = float(np.logaddexp(init.log_weight, final.log_weight))
        proposal = init.proposal
        if final.log_weight > log_weight:
            proposal = final.proposal
        elif self.rng.uniform() < math.exp(final.log_weight - log_weight):
            proposal = final.proposal

        rho = init.rho + final.rho
        persist = _no_u_turn(init.v_begin, final.v_end, rho)
        persist &= _no_u_turn(init.v_begin, final.v_begin, init.rho + final.p_begin)
        persist &= _no_u_turn(init.v_end, final.v_end, final.rho + init.p_end)
        return _Subtree(
            final.last, proposal, log_weight, rho,
            init.p_begin, final.p_end, init.v_begin, final.v_end, persist,
        )

    def _leaf(self, start: PhasePoint, sign: int) -> _Subtree:
        point = leapfrog(start, sign * self.step_size, self.inv_mass, self.target)
        self.n_leapfrog += 1
        h = point.hamiltonian(self.inv_mass)
        if h - self.h0 > self.max_delta_h:
            self.divergent = True
        log_weight = self.h0 - h
        self.sum_metro_prob += 1.0 if log_weight > 0 else math.exp(log_weight)
        velocity = point.velocity(self.inv_mass)
        return _Subtree(
            point, point, log_weight, point.p.copy(),
            point.p, point.p, velocity, velocity, not self.divergent,
        )


def nuts_transition(
    point: PhasePoint,
    target: DensityGradient,
    step_size: float,
    inv_mass: np.ndarray,
    rng: np.random.Generator,
    max_tree_depth: int = 10,
    divergence_threshold: float = 1000.0,
) -> Tuple[PhasePoint, TransitionStats]:
    """One no-U-turn transition from ``point`` (its momentum is resampled)."""
    if not step_size > 0:
        raise ValueError("step_size must be positive")
    momentum = rng.standard_normal(point.q.shape) / np.sqrt(inv_mass)
    z = point.with_momentum(momentum)
    h0 = z.hamiltonian(inv_mass)
    builder = _TreeBuilder(target, step_size, inv_mass, h0, divergence_threshold, rng)

    forward = backward = sample = z
    log_sum_weight = 0.0
    rho = momentum.copy()
    velocity = z.velocity(inv_mass)
    p_fwd_bck = p_fwd_fwd = p_bck_fwd = p_bck_bck = momentum
    v_fwd_bck = v_fwd_fwd = v_bck_fwd = v_bck_bck = velocity

    depth = 0
    while depth < max_tree_depth:
        if rng.uniform() > 0.5:
            rho_bck = rho
            p_bck_fwd, v_bck_fwd = p_fwd_fwd, v_fwd_fwd
            subtree = builder.build(forward, depth, 1)
            forward = subtree.last
            rho_fwd = subtree.rho
            p_fwd_bck, p_fwd_fwd = subtree.p_begin, subtree.p_end
            v_fwd_bck, v_fwd_fwd = subtree.v_begin, subtree.v_end
        else:
            rho_fwd = rho
            p_fwd_bck, v_fwd_bck = p_bck_bck, v_bck_bck
            subtree = builder.build(backward, depth, -1)
            backward = subtree.last
            rho_bck = subtree.rho
            p_bck_fwd, p_bck_bck = subtree.p_begin, subtree.p_end
            v_bck_fwd, v_bck_bck = subtree.v_begin, subtree.v_end

        if not subtree.valid:
            break
        depth += 1

        if subtree.log_weight > log_sum_weight:
            sample = subtree.proposal
        elif rng.uniform() < math.exp(subtree.log_weight - log_sum_weight):
            sample = subtree.proposal
        log_sum_weight = float(np.logaddexp(log_sum_weight, subtree.log_weight))

        rho = rho_bck + rho_fwd
        persist = _no_u_turn(v_bck_bck, v_fwd_fwd, rho)
        persist &= _no_u_turn(v_bck_bck, v_fwd_bck, rho_bck + p_fwd_bck)
        persist &= _no_u_turn(v_bck_fwd, v_fwd_fwd, rho_fwd + p_bck_fwd)
        if not persist:
            break

    stats = TransitionStats(
        accept_stat=builder.sum_metro_prob / builder.n_leapfrog,
        n_leapfrog=builder.n_leapfrog,
        tree_depth=depth,
        divergent=builder.divergent,
        energy=sample.hamiltonian(inv_mass),
    )
    return sample, stats
