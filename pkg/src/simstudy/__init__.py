"""
Simulation study module for hazardfield.

Study geometry and true intensities, synthetic surveys with quadrature
exposures, replicated fits with bias/MSE/coverage/IMAE estimators, and the
grid refinement check.
"""

from .landscape import (
    CROSSING_HEIGHT_KM,
    REGION_HEIGHT_KM,
    REGION_WIDTH_KM,
    study_cell_counts,
    study_geometry,
    true_intensities,
)
from .scenario import StudyConfig, StudyScenario, TruthRecord, derive_seed
from .households import (
    STUDY_REGION,
    clustered_population,
    sample_households,
    uniform_population,
)
from .generate import (
    generate_dataset,
    household_ids,
    infection_probabilities,
    prior_predictive,
)
from .estimators import (
    ReplicationErrors,
    cell_imae,
    estimate,
    estimate_imae,
    interval_covers,
    replication_errors,
)
from .study import StudyResult, StudyRunner, run_study, scenario_grid
from .refinement import ValidationConfig, loglog_slope, run_validation, smooth_field

__all__ = [
    # Study landscape
    'REGION_WIDTH_KM',
    'REGION_HEIGHT_KM',
    'CROSSING_HEIGHT_KM',
    'study_geometry',
    'true_intensities',
    'study_cell_counts',

    # Scenarios
    'StudyScenario',
    'StudyConfig',
    'TruthRecord',
    'derive_seed',

    # Data generation
    'STUDY_REGION',
    'uniform_population',
    'clustered_population',
    'sample_households',
    'household_ids',
    'infection_probabilities',
    'generate_dataset',
    'prior_predictive',

    # Estimators
    'ReplicationErrors',
    'interval_covers',
    'cell_imae',
    'replication_errors',
    'estimate',
    'estimate_imae',

    # Orchestration
    'StudyResult',
    'StudyRunner',
    'scenario_grid',
    'run_study',

    # Refinement check
    'ValidationConfig',
    'smooth_field',
    'loglog_slope',
    'run_validation',
]
