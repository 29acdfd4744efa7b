import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from tcbm_credit import BrownianParams, DomainError
from tcbm_credit.brownian import (
    fp_cdf,
    fp_laplace_exponent,
    heat_kernel,
    heat_kernel_contour,
    survival_level_density,
    survival_level_joint,
)


def passage_density(t, x, sigma, beta):
    """Inverse Gaussian first-passage density of x + sigma W + beta sigma^2 t to 0."""
    return x / (sigma * math.sqrt(2 * math.pi * t**3)) * math.exp(
        -((x + beta * sigma**2 * t) ** 2) / (2 * sigma**2 * t)
    )


@pytest.mark.parametrize("beta", [-0.5, 0.0, 0.7])
@pytest.mark.parametrize("t", [0.1, 1.0, 7.0])
def test_fp_cdf_matches_integrated_density(beta, t):
    x, sigma = 0.8, 0.3
    oracle, _ = integrate.quad(passage_density, 0, t, args=(x, sigma, beta), epsabs=1e-13, limit=200)
    assert fp_cdf(t, BrownianParams(x, sigma, beta)) == pytest.approx(oracle, abs=1e-10)


def test_fp_cdf_matches_scipy_closed_form():
    x, sigma, beta = 1.2, 0.25, -0.3
    t = np.array([0.05, 0.5, 3.0, 40.0])
    mu = beta * sigma**2 * t
    s = sigma * np.sqrt(t)
    oracle = stats.norm.cdf((-x - mu) / s) + np.exp(-2 * beta * x) * stats.norm.cdf((-x + mu) / s)
    np.testing.assert_allclose(fp_cdf(t, BrownianParams(x, sigma, beta)), oracle, atol=1e-14)


def test_fp_cdf_total_mass():
    p_up = BrownianParams(0.5, 0.3, 0.4)
    p_down = BrownianParams(0.5, 0.3, -0.4)
    assert fp_cdf(1e6, p_up) == pytest.approx(math.exp(-2 * 0.4 * 0.5), abs=1e-12)
    assert fp_cdf(1e6, p_down) == pytest.approx(1.0, abs=1e-12)


def test_fp_cdf_large_positive_drift_is_finite():
    p = BrownianParams(30.0, 1.0, 50.0)
    val = fp_cdf(np.array([0.1, 10.0, 1e4]), p)
    assert np.all(np.isfinite(val)) and np.all(val >= 0) and val.max() < 1e-300 + 1e-12


def test_laplace_exponent_matches_transform_of_density():
    x, sigma, beta = 0.7, 0.4, -0.2
    p = BrownianParams(x, sigma, beta)
    for u in [0.1, 1.0, 5.0]:
        val, _ = integrate.quad(lambda t: math.exp(-u * t) * passage_density(t, x, sigma, beta),
                                0, np.inf, epsabs=1e-13, limit=400)
        assert fp_laplace_exponent(u, p) == pytest.approx(-math.log(val), rel=1e-9)


def test_joint_survival_consistent_with_level_density():
    p = BrownianParams(0.6, 0.35, -0.5)
    t = 2.0
    assert survival_level_joint(t, 0.0, p) == pytest.approx(1.0 - fp_cdf(t, p), abs=1e-13)
    for ell in [0.1, 0.5, 1.5]:
        mass, _ = integrate.quad(lambda y: survival_level_density(t, y, p), ell, np.inf, epsabs=1e-13)
        assert survival_level_joint(t, ell, p) == pytest.approx(mass, abs=1e-10)


def test_joint_survival_rejects_negative_level():
    with pytest.raises(DomainError):
        survival_level_joint(1.0, -0.1, BrownianParams(1.0, 0.3, -0.5))


@pytest.mark.parametrize("shift", [0.0, 0.5, -1.3, 2.0])
def test_heat_kernel_contour_shift(shift):
    for x in [-0.7, 0.0, 0.4]:
        assert heat_kernel_contour(x, 0.3, shift) == pytest.approx(heat_kernel(x, 0.3), abs=1e-10)


def test_invalid_parameters():
    with pytest.raises(DomainError):
        BrownianParams(1.0, 0.0, -0.5)
    with pytest.raises(DomainError):
        fp_cdf(1.0, BrownianParams(-0.1, 0.3, -0.5))
    with pytest.raises(DomainError):
        fp_laplace_exponent(-1.0, BrownianParams(1.0, 0.3, -0.5))


@settings(max_examples=60, deadline=None)
@given(
    x=st.floats(0.01, 3.0),
    sigma=st.floats(0.05, 1.0),
    beta=st.floats(-2.0, 2.0),
    t1=st.floats(1e-3, 50.0),
    dt=st.floats(1e-3, 50.0),
)
def test_fp_cdf_monotone(x, sigma, beta, t1, dt):
    p = BrownianParams(x, sigma, beta)
    a, b = fp_cdf(t1, p), fp_cdf(t1 + dt, p)
    assert 0.0 <= a <= b + 1e-15 <= 1.0 + 1e-15
    # starting further away can only delay the passage
    assert fp_cdf(t1, p.with_x(1.5 * x)) <= a + 1e-15
