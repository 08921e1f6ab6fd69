import numpy as np
import pytest

from sphshift.scalarseq import default_suite


@pytest.fixture(scope="session")
def suite_m2():
    return default_suite(2)


@pytest.fixture(scope="session")
def suite_m3():
    return default_suite(3)


def assert_close(a, b, tol=1e-12, msg=""):
    assert abs(a - b) <= tol * max(1.0, abs(a), abs(b)), f"{a} != {b} {msg}"


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
