"""Shared fixtures: the running two-level example and seeded generators."""

from fractions import Fraction

import numpy as np
import pytest

from thermoconv import Distribution, EmbeddingSpec, ThermalSystem, gibbs_state
from thermoconv.distributions import FLOAT, RATIONAL


@pytest.fixture(scope="session")
def demo_system():
    # two levels at T = 3 (k_B = 1), the instance used throughout the docs
    return ThermalSystem(energies=(0, 1), beta=Fraction(1, 3))


@pytest.fixture(scope="session")
def demo_spec(demo_system):
    return EmbeddingSpec.from_system(demo_system)


@pytest.fixture(scope="session")
def demo_p():
    return Distribution([0.7, 0.3], mode=FLOAT)


@pytest.fixture(scope="session")
def demo_q():
    return Distribution([0.8, 0.2], mode=FLOAT)


@pytest.fixture(scope="session")
def demo_gibbs(demo_system):
    return gibbs_state(demo_system, mode=FLOAT)


@pytest.fixture(scope="session")
def uniform_system():
    # degenerate two-level system: the thermal state is uniform
    return ThermalSystem(energies=(0, 0), beta=Fraction(1))


@pytest.fixture
def rng():
    return np.random.default_rng(20260819)


def pure_rational(dim):
    entries = [Fraction(0)] * dim
    entries[0] = Fraction(1)
    return Distribution(entries, mode=RATIONAL)
