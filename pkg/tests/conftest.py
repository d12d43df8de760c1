import os
from unittest import mock

import numpy as np
import pytest

from ion_cnot_sim.color_code import steane_layout
from ion_cnot_sim.noise import NoiseParams


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: exhaustive or high-shot checks")


@pytest.fixture(autouse=True, scope="function")
def ensure_log_level_is_isolated():
    with mock.patch.dict(os.environ):
        os.environ.pop("ION_CNOT_SIM_LOG_LEVEL", None)
        yield


@pytest.fixture
def layout():
    return steane_layout()


@pytest.fixture
def noiseless():
    return NoiseParams(p_m=0.0, p_1q=0.0, p_2q=0.0, p_5q=0.0, p_cross=0.0, p_idle_override=0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
