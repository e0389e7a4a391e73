"""Hazard Field - Bayesian exposure modelling for extensive environmental hazards"""

__version__ = "0.1.0"
