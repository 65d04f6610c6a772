import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dconfocal.errors import DomainError
from dconfocal.specfun import dsqrt, log_gamma, pochhammer


def oracle_dsqrt(u):
    mpmath.mp.dps = 30
    return float(mpmath.gamma(u + mpmath.mpf("0.5")) / mpmath.gamma(u))


def test_log_gamma_examples():
    assert log_gamma(1.0) == 0.0
    assert log_gamma(0.5) == pytest.approx(0.5723649429247001, rel=1e-14)
    assert log_gamma(10.0) == pytest.approx(12.80182748008147, rel=1e-14)


@pytest.mark.parametrize("u", [1e-3, 0.1, 0.5, 3.7, 42.0, 1e3, 1e6])
def test_log_gamma_against_mpmath(u):
    ref = float(mpmath.loggamma(u))
    assert abs(log_gamma(u) - ref) <= 1e-13 * max(1.0, abs(ref))


@pytest.mark.parametrize("u", [0.0, -1.0, float("nan"), float("inf")])
def test_log_gamma_rejects(u):
    with pytest.raises(DomainError):
        log_gamma(u)


def test_pochhammer_examples():
    assert pochhammer(3, 1) == pytest.approx(3.0, rel=1e-14)
    assert pochhammer(1, 0.5) == pytest.approx(0.8862269254527580, rel=1e-14)
    assert pochhammer(0, 0.5) == 0.0


def test_pochhammer_rejects_negative():
    with pytest.raises(DomainError):
        pochhammer(-0.5, 0.5)
    with pytest.raises(DomainError):
        pochhammer(1.0, 0.0)


def test_dsqrt_examples():
    assert dsqrt(0) == 0.0
    assert dsqrt(1) == pytest.approx(0.8862269254527580, rel=1e-14)
    # frozen from a 30-digit gamma evaluation
    assert dsqrt(4) == pytest.approx(1.9386213994279082, rel=1e-14)
    # the commonly quoted 8-digit value agrees only to a few parts per million
    assert abs(dsqrt(4) - 1.9386188) < 1e-5


def test_dsqrt_large_argument_no_overflow():
    # raw gamma overflows past ~171; the log form must not
    u = 500.0
    assert dsqrt(u) == pytest.approx(oracle_dsqrt(u), rel=1e-12)
    assert dsqrt(u) == pytest.approx(math.sqrt(u), rel=1e-3)


@given(st.floats(min_value=0.01, max_value=300.0))
@settings(max_examples=60, deadline=None)
def test_dsqrt_matches_oracle(u):
    assert dsqrt(u) == pytest.approx(oracle_dsqrt(u), rel=1e-12)


@given(st.floats(min_value=0.25, max_value=200.0))
def test_difference_identity(u):
    assert abs(dsqrt(u + 1) - dsqrt(u) - 0.5 / dsqrt(u + 0.5)) <= 1e-12


@given(st.floats(min_value=0.0, max_value=200.0))
def test_product_identity(u):
    assert abs(dsqrt(u) * dsqrt(u + 0.5) - u) <= 1e-12 * max(1.0, u)


@given(st.floats(min_value=0.0, max_value=100.0), st.floats(min_value=1e-6, max_value=5.0))
def test_dsqrt_monotone(u, du):
    assert dsqrt(u + du) > dsqrt(u)


@pytest.mark.parametrize("u", [1.0, 2.0, 5.0])
def test_scaling_limit_decreases(u):
    errs = [abs(math.sqrt(eps) * pochhammer(u / eps, 0.5) - math.sqrt(u)) for eps in 10.0 ** -np.arange(1, 5)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
