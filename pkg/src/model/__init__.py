"""
Model module for hazardfield.

Survey data, the model specification, the unconstrained parameter layout,
the single-hit likelihood, priors, the joint posterior and posterior
functionals.
"""

from .dataset import SurveyDataset, load_dataset, save_dataset
from .spec import ModelSpec
from .state import LatentState, ParameterLayout
from .likelihood import (
    bernoulli_terms,
    infection_prob,
    log1mexp,
    observation_log_pmf,
    per_obs_rate,
)
from .prior import log_prior
from .posterior import HazardPosterior
from .functionals import (
    OddsChangeSummary,
    change_in_odds,
    exposure_at,
    min_distance_predictor,
    odds_change_curve,
    summarize_odds_change,
)

__all__ = [
    # Data
    'SurveyDataset',
    'load_dataset',
    'save_dataset',

    # Specification and state
    'ModelSpec',
    'ParameterLayout',
    'LatentState',

    # Likelihood and prior
    'log1mexp',
    'infection_prob',
    'per_obs_rate',
    'bernoulli_terms',
    'observation_log_pmf',
    'log_prior',

    # Posterior
    'HazardPosterior',

    # Functionals
    'OddsChangeSummary',
    'exposure_at',
    'change_in_odds',
    'summarize_odds_change',
    'odds_change_curve',
    'min_distance_predictor',
]
