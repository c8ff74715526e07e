import numpy as np
import pytest

from pmdiff import ScalarField


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def random_field(rng):
    return ScalarField(rng.uniform(0.0, 1.0, (7, 9)))


def make_field(values, dx=1.0, dy=1.0):
    return ScalarField(np.asarray(values, dtype=np.float64), dx=dx, dy=dy)
