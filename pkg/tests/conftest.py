import numpy as np
import pytest

from tfoc.grid import make_grid


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(params=[32, 64])
def grid(request):
    return make_grid(request.param)


def random_signal(grid, rng):
    v = rng.standard_normal(grid.n_points) + 1j * rng.standard_normal(grid.n_points)
    return grid.signal(v)


def gaussian(grid, center=0.0, width=1.0, mod=0.0):
    return grid.sample(lambda x: np.exp(-((x - center) ** 2) / (2 * width**2) + 1j * mod * x))
