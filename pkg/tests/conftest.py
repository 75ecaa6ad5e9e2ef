import numpy as np
import pytest

from lithoqed import HalfSpaceEnvironment, MaterialModel


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


@pytest.fixture
def env_mirror():
    return HalfSpaceEnvironment(MaterialModel.perfect_mirror())


@pytest.fixture
def env_dielectric():
    return HalfSpaceEnvironment(MaterialModel.constant(1.8))


@pytest.fixture
def env_vacuum():
    return HalfSpaceEnvironment(MaterialModel.vacuum())
