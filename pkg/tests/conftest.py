import numpy as np
import pytest

from morreylab.indices import ProblemDims


@pytest.fixture(scope="session")
def dims1():
    return ProblemDims(1, 1, 1.0)


@pytest.fixture(scope="session")
def dims2():
    return ProblemDims(2, 1, 1.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(1234)
