import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cheb_bernstein import (Interval, build_bernstein_basis, build_operator, constant,
                            make_haar_pair, make_polynomial_space, monomial)

settings.register_profile("default", deadline=None, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("stress", deadline=None, max_examples=1000,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

UNIT = Interval(0.0, 1.0)


def rounding_bound(B, x):
    """Per-point rounding level of evaluating the basis through raw coordinates."""
    H = np.abs(B.space.values(x))
    return 64 * np.finfo(float).eps * (H @ np.abs(B.coeffs).T)


def linear_pair(interval=UNIT):
    return make_haar_pair(constant(1.0), monomial(1), interval)


def classical_operator(n, interval=UNIT):
    return build_operator(build_bernstein_basis(make_polynomial_space(n, interval)),
                          linear_pair(interval))


@pytest.fixture
def unit():
    return UNIT


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
