"""Shared fixtures: the study geometry, small partitions and a tiny survey."""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add repository root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.geometry.partition import build_partition  # noqa: E402
from src.model.dataset import SurveyDataset  # noqa: E402
from src.model.spec import ModelSpec  # noqa: E402
from src.simstudy.landscape import study_cell_counts, study_geometry  # noqa: E402


@pytest.fixture
def study_network():
    """Three-canal study network with y in one piece."""
    return study_geometry(split_y=False)


@pytest.fixture
def split_network():
    """Study network with y split at the x2 crossing."""
    return study_geometry(split_y=True)


@pytest.fixture
def small_partition(study_network):
    return build_partition(study_network, 4)


@pytest.fixture
def split_partition(split_network):
    return build_partition(split_network, study_cell_counts(6))


@pytest.fixture
def tiny_dataset():
    """Six households, two observations each, one covariate."""
    locations = np.array([
        [2.0, 0.4], [5.3, 1.2], [7.9, 2.5], [4.6, 3.1], [9.0, 0.2], [1.0, 3.8],
    ])
    covariates = np.array([[0.3], [-1.1], [0.0], [0.8], [-0.4], [1.5]])
    outcomes = np.array([1, 0, 0, 0, 1, 1, 0, 0, 1, 0, 0, 0])
    return SurveyDataset(
        household_ids=tuple(f"h{j + 1}" for j in range(6)),
        locations=locations,
        covariates=covariates,
        groups=np.array([0, 1, 0, 1, 0, 1]),
        observation_households=np.repeat(np.arange(6), 2),
        outcomes=outcomes,
    )


@pytest.fixture
def fixed_omega_spec():
    """Coarse grid with the lengthscale held at 2 km."""
    return ModelSpec(cells=4, omega=2.0)


@pytest.fixture
def sampled_omega_spec():
    """Coarse grid with the lengthscale sampled."""
    return ModelSpec(cells=4)


def finite_difference_gradient(fn, x, step=1e-6):
    """Central differences of a scalar function."""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.size):
        up = x.copy()
        down = x.copy()
        up[i] += step
        down[i] -= step
        grad[i] = (fn(up) - fn(down)) / (2.0 * step)
    return grad


@pytest.fixture
def numeric_gradient():
    return finite_difference_gradient


def five_point_gradient(fn, x, step=1e-4):
    """Fourth-order central differences of a scalar function."""
    x = np.asarray(x, dtype=float)
    grad = np.zeros_like(x)
    for i in range(x.size):
        shifted = []
        for offset in (2.0, 1.0, -1.0, -2.0):
            point = x.copy()
            point[i] += offset * step
            shifted.append(fn(point))
        far_up, up, down, far_down = shifted
        grad[i] = (8.0 * (up - down) - (far_up - far_down)) / (12.0 * step)
    return grad


@pytest.fixture
def precise_gradient():
    return five_point_gradient
