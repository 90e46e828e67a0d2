import numpy as np
import pytest

from setinfo import Experiment, builtin, d_phi_set, dvarn
from setinfo.verify import random_experiment


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)


@pytest.fixture
def coin():
    """The running two-coin example: rows (0.5,0.5) and (0.25,0.75)."""
    return Experiment(np.array([[0.5, 0.5], [0.25, 0.75]]))


@pytest.fixture
def kl_set():
    return d_phi_set(builtin("kl"))


@pytest.fixture
def dvar2():
    return dvarn(2)


def make_random_experiment(rng, n, m, zero_rate=0.0):
    return random_experiment(rng, n, m, zero_rate=zero_rate)
