import numpy as np
import pytest

from ffcircle.ffpoly import FieldParams


@pytest.fixture
def F2():
    return FieldParams(2)


@pytest.fixture
def F3():
    return FieldParams(3)


@pytest.fixture
def F4():
    return FieldParams(2, 2, (1, 1, 1))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
