import numpy as np
import pytest

from atap.representations.sl2_reps import KnotParams, riley_roots


def pytest_addoption(parser):
    parser.addoption(
        "--full-grid",
        help='Run the acceptance grid over every sign pattern and x sample.',
        action='store_true', default=False
)


@pytest.fixture(scope="session")
def full_grid(request) -> bool:
    return request.config.getoption("full_grid")


@pytest.fixture(scope="function")
def rng():
    return np.random.default_rng(20170)


@pytest.fixture(scope="session")
def trefoil():
    params = KnotParams(1, 1)
    reps = riley_roots(params, 1)
    assert len(reps) == 1
    return params, reps[0]
