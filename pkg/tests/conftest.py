"""
Shared fixtures and the --runslow switch
"""

import numpy as np
import pytest

from src.models import ObservationSet
from src.synthetic import SamplingScheme, ScenarioSpec


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run full-scale benchmark tests"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_scenario():
    return ScenarioSpec(
        m1=20, m2=20, r=2, scheme=SamplingScheme.S1, sampling_ratio=0.6, snr_db=None, seed=7
    )


@pytest.fixture
def rank_one_full():
    """Fully observed noiseless rank-1 matrix"""
    truth = np.outer([1.0, 2.0, -1.0, 0.5], [3.0, -1.0, 2.0])
    return truth, ObservationSet.from_matrix(truth)


def random_with_spectrum(rng, shape, spectrum):
    """Matrix U diag(spectrum) V^T with Haar-random orthonormal factors"""
    m1, m2 = shape
    k = len(spectrum)
    U, _ = np.linalg.qr(rng.standard_normal((m1, k)))
    V, _ = np.linalg.qr(rng.standard_normal((m2, k)))
    return (U * np.asarray(spectrum)) @ V.T
