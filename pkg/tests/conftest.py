import numpy as np
import pytest
from hypothesis import settings

from superkepler.sampling import sample_points

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

CIRCULAR = np.array([1.0, 0.0, 0.0, 1.0])
ELLIPTIC = np.array([2.0, 0.0, 0.0, 0.5])
HYPERBOLIC = np.array([1.0, 0.0, 0.0, 2.0])


@pytest.fixture(scope="session")
def u_points():
    return sample_points(1000, seed=7, regime="U")


@pytest.fixture(scope="session")
def so3_points():
    return sample_points(1000, seed=11, regime="so3")


@pytest.fixture(scope="session")
def so21_points():
    return sample_points(1000, seed=13, regime="so21")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
