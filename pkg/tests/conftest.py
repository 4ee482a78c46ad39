import numpy as np
import pytest

from flexcycle import fixtures


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def octa():
    return fixtures.octahedron()


@pytest.fixture
def bricard():
    return fixtures.bricard_type1()


@pytest.fixture(scope="session")
def bricard_flex():
    from flexcycle.flex import default_pin, trace_flex

    T, rho = fixtures.bricard_type1()
    return T, rho, trace_flex(T, rho, default_pin(T, rho), step=1e-2, max_samples=100)


@pytest.fixture(scope="session")
def hinge_flex():
    from flexcycle.flex import PinnedFrame, trace_flex

    T, rho = fixtures.hinge()
    pin = PinnedFrame.from_realization((0, 1, 2), rho)
    return T, rho, trace_flex(T, rho, pin, step=1e-2, max_samples=60)
