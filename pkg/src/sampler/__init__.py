"""
Sampler module for hazardfield.

Leapfrog integration, multinomial no-U-turn transitions, warmup adaptation
and multi-chain orchestration with draws files.
"""

from .config import SamplerConfig
from .integrator import PhasePoint, evaluate, leapfrog
from .nuts import TransitionStats, nuts_transition
from .adaptation import (
    AdaptationSchedule,
    DualAveraging,
    adaptation_windows,
    find_reasonable_step_size,
    regularized_variance,
)
from .runner import (
    META_COLUMNS,
    ChainOutput,
    FunctionTarget,
    PosteriorDraws,
    PosteriorTarget,
    draws_filename,
    initialize,
    read_draws,
    run_chain,
    run_chains,
    write_draws,
)

__all__ = [
    # Configuration
    'SamplerConfig',

    # Integration
    'PhasePoint',
    'evaluate',
    'leapfrog',

    # Transitions
    'TransitionStats',
    'nuts_transition',

    # Adaptation
    'AdaptationSchedule',
    'DualAveraging',
    'adaptation_windows',
    'find_reasonable_step_size',
    'regularized_variance',

    # Chains
    'PosteriorTarget',
    'FunctionTarget',
    'ChainOutput',
    'PosteriorDraws',
    'META_COLUMNS',
    'initialize',
    'run_chain',
    'run_chains',
    'draws_filename',
    'write_draws',
    'read_draws',
]
