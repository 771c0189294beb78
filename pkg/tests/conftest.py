import numpy as np
import pytest

from mwcoherence.model import fullerene_scenario


@pytest.fixture(scope="session")
def c60():
    return fullerene_scenario()


@pytest.fixture(scope="session")
def fringe_period(c60):
    return 2.5e-12 * 1.25 / 1e-7


def central_grid(period, orders=5, per_period=64):
    n = int(2 * orders * per_period) + 1
    return np.linspace(-orders * period, orders * period, n)
