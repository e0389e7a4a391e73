"""
Diagnostics module for hazardfield.

Rank-normalized split R-hat, bulk and tail effective sample sizes, and the
fit report.
"""

from .convergence import (
    autocovariance,
    ess_bulk,
    ess_tail,
    split_chains,
    split_rhat_rank_normalized,
    z_scale,
)
from .summary import (
    QUANTILE_PROBS,
    REPORT_COLUMNS,
    RHAT_THRESHOLD,
    FitReport,
    ParameterSummary,
    posterior_quantiles,
    read_report,
    summarize,
    summarize_parameter,
    write_report,
)

__all__ = [
    # Convergence
    'z_scale',
    'split_chains',
    'autocovariance',
    'split_rhat_rank_normalized',
    'ess_bulk',
    'ess_tail',

    # Summaries
    'QUANTILE_PROBS',
    'REPORT_COLUMNS',
    'RHAT_THRESHOLD',
    'ParameterSummary',
    'FitReport',
    'posterior_quantiles',
    'summarize_parameter',
    'summarize',
    'write_report',
    'read_report',
]
