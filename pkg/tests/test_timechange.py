import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from tcbm_credit import (
    BrownianParams,
    ConvexCombination,
    DeterministicClock,
    DomainError,
    ExponentialSubordinator,
    GammaSubordinator,
    IGSubordinator,
    IntegratedCIR,
    IntegratedOUJump,
    SimConfig,
    combine,
    cumulants,
    mean_rate,
    tcbm_char_fn,
)
from tcbm_credit.montecarlo import mc_char_fn, mc_laplace

FAMILIES = {
    "exponential": ExponentialSubordinator(2.0, 0.5, 1.0, normalized=True),
    "gamma": GammaSubordinator(1.0, 0.0, 1.0, normalized=True),
    "ig": IGSubordinator(1.5, 1.5, normalized=True),
    "cir": IntegratedCIR(1.0, 1.0, 0.5, 1.0, normalized=True),
    "oujump": IntegratedOUJump(2.0, 1.0, 2.0, 1.0, normalized=True),
    "deterministic": DeterministicClock(1.0),
}


def riccati_cir(tc, u, t):
    """Integrate A' = u - bA - cA^2, B' = aA from zero (complex u allowed)."""

    def rhs(_, y):
        A = y[0]
        return [u - tc.b * A - tc.c * A * A, tc.a * A]

    sol = integrate.solve_ivp(rhs, (0, t), [0j, 0j], rtol=1e-12, atol=1e-14, method="DOP853")
    A, B = sol.y[:, -1]
    return tc.lambda0 * A + B


def riccati_oujump(tc, u, t):
    """A' = u - b~A, B' = c~ A / (a~ + A)."""

    def rhs(_, y):
        A = y[0]
        return [u - tc.b_tilde * A, tc.c_tilde * A / (tc.a_tilde + A)]

    sol = integrate.solve_ivp(rhs, (0, t), [0j, 0j], rtol=1e-12, atol=1e-14, method="DOP853")
    A, B = sol.y[:, -1]
    return tc.lambda0 * A + B


@pytest.mark.parametrize("u", [0.3, 2.0, 1.0 + 3.0j, 0.05 - 1.5j, -0.2])
@pytest.mark.parametrize("t", [0.5, 4.0])
def test_cir_exponent_solves_riccati(u, t):
    tc = IntegratedCIR(0.8, 1.2, 0.4, 0.6)
    assert abs(tc.laplace_exponent(u, t) - riccati_cir(tc, u, t)) < 1e-9


@pytest.mark.parametrize("u", [0.3, 2.0, 1.0 + 3.0j, -0.5])
@pytest.mark.parametrize("t", [0.5, 4.0])
def test_oujump_exponent_solves_riccati(u, t):
    tc = IntegratedOUJump(1.5, 0.7, 1.2, 0.4)
    assert abs(tc.laplace_exponent(u, t) - riccati_oujump(tc, u, t)) < 1e-9


def test_gamma_exponent_against_gamma_law():
    tc = GammaSubordinator(3.0, 0.2, 1.5)
    t, u = 2.0, 0.7
    law = stats.gamma(a=tc.c * t, scale=1 / tc.a)
    val, _ = integrate.quad(lambda g: math.exp(-u * (g + tc.b * t)) * law.pdf(g), 0, np.inf, epsabs=1e-13)
    assert tc.laplace_exponent(u, t) == pytest.approx(-math.log(val), rel=1e-10)


def test_ig_exponent_against_inverse_gaussian_law():
    tc = IGSubordinator(1.3, 0.9)
    t, u = 1.7, 0.8
    mean, shape = tc.gamma_tilde * t / tc.beta_tilde, (tc.gamma_tilde * t) ** 2
    law = stats.invgauss(mu=mean / shape, scale=shape)
    val, _ = integrate.quad(lambda g: math.exp(-u * g) * law.pdf(g), 0, np.inf, epsabs=1e-13, limit=200)
    assert tc.laplace_exponent(u, t) == pytest.approx(-math.log(val), rel=1e-9)


def test_exponential_exponent_against_poisson_sum():
    tc = ExponentialSubordinator(2.0, 0.3, 1.4)
    t, u = 1.5, 0.9
    n = np.arange(80)
    mixture = stats.poisson.pmf(n, tc.c * t) @ (tc.a / (tc.a + u)) ** n
    assert tc.laplace_exponent(u, t) == pytest.approx(tc.b * t * u - math.log(mixture), rel=1e-12)


@pytest.mark.parametrize("name", list(FAMILIES))
def test_zero_at_origin_and_zero_time(name):
    tc = FAMILIES[name]
    assert tc.laplace_exponent(0.0, 3.0) == pytest.approx(0.0, abs=1e-15)
    assert np.all(tc.laplace_exponent(np.array([0.5, 2.0]), 0.0) == 0.0)


@pytest.mark.parametrize("name", [n for n in FAMILIES if n != "deterministic"])
def test_domain_below_u_min(name):
    tc = FAMILIES[name]
    with pytest.raises(DomainError):
        tc.laplace_exponent(tc.u_min - 0.1, 1.0)


@pytest.mark.parametrize("name", list(FAMILIES))
def test_normalized_mean_rate(name):
    tc = FAMILIES[name]
    assert mean_rate(tc, 50.0) == pytest.approx(1.0, abs=1e-5)


def test_stationary_affine_mean_rate_all_horizons():
    cir = IntegratedCIR(2.0, 2.0, 0.7, 1.0, normalized=True)
    ou = IntegratedOUJump(2.0, 0.5, 1.0, 1.0, normalized=True)
    for t in [0.1, 0.5, 3.0, 20.0]:
        assert mean_rate(cir, t) == pytest.approx(1.0, abs=1e-9)
        assert mean_rate(ou, t) == pytest.approx(1.0, abs=1e-9)


def test_normalized_flag_rejects_wrong_mean():
    with pytest.raises(DomainError):
        GammaSubordinator(2.0, 0.0, 1.0, normalized=True)
    with pytest.raises(DomainError):
        IntegratedCIR(1.0, 2.0, 0.5, 0.5, normalized=True)


def test_cumulants_of_gamma_and_ig():
    g = GammaSubordinator(2.0, 0.5, 3.0)
    t = 1.5
    assert cumulants(g, t, 1) == pytest.approx(t * (g.b + g.c / g.a), rel=1e-10)
    assert cumulants(g, t, 2) == pytest.approx(t * g.c / g.a**2, rel=1e-9)
    assert cumulants(g, t, 3) == pytest.approx(2 * t * g.c / g.a**3, rel=1e-8)
    ig = IGSubordinator(1.2, 0.8)
    mean, shape = ig.gamma_tilde * t / ig.beta_tilde, (ig.gamma_tilde * t) ** 2
    assert cumulants(ig, t, 2) == pytest.approx(mean**3 / shape, rel=1e-9)


def test_combine_rules():
    g = FAMILIES["gamma"]
    assert combine([(1.0, g), (0.0, None)]) is g
    cc = combine([(0.4, g), (0.6, FAMILIES["ig"])])
    assert isinstance(cc, ConvexCombination)
    u = np.array([0.2, 1.3])
    expected = g.laplace_exponent(0.4 * u, 2.0) + FAMILIES["ig"].laplace_exponent(0.6 * u, 2.0)
    np.testing.assert_allclose(cc.laplace_exponent(u, 2.0), expected, rtol=1e-14)
    assert mean_rate(cc, 50.0) == pytest.approx(1.0, abs=1e-5)
    with pytest.raises(DomainError):
        ConvexCombination(((0.5, g), (0.4, g)))


def test_atoms_and_lower_bounds():
    e = ExponentialSubordinator(2.0, 0.5, 1.0)
    assert e.atom(3.0) == pytest.approx((1.5, math.exp(-3.0)))
    assert FAMILIES["gamma"].atom(1.0) is None
    assert FAMILIES["oujump"].lower_bound(2.0) == pytest.approx((1 - math.exp(-2.0)) / 1.0)
    assert DeterministicClock(0.7).is_deterministic
    assert ExponentialSubordinator(1.0, 1.0, 0.0).is_deterministic


@pytest.mark.parametrize("name", list(FAMILIES))
def test_laplace_transform_against_simulation(name):
    tc = FAMILIES[name]
    u = np.array([0.3, 1.5])
    res = mc_laplace(tc, u, 2.0, SimConfig(seed=101, n_paths=40_000, dt=0.01))
    assert np.all(np.abs(res.z_score(np.exp(-tc.laplace_exponent(u, 2.0)))) < 4.0)


def test_char_fn_against_simulation():
    tc = combine([(0.5, FAMILIES["gamma"]), (0.5, FAMILIES["oujump"])])
    p = BrownianParams(1.0, 0.3, -0.5)
    for u in [1.0, 4.0]:
        exact = tcbm_char_fn(tc, p, u, 3.0)
        res = mc_char_fn(tc, p, u, 3.0, SimConfig(seed=5, n_paths=50_000))
        assert abs(res.estimate - exact) < 4 * res.stderr


@settings(max_examples=50, deadline=None)
@given(
    name=st.sampled_from([n for n in FAMILIES if n != "deterministic"]),
    t=st.floats(0.05, 30.0),
    u=st.floats(0.0, 20.0),
    h=st.floats(0.01, 2.0),
)
def test_exponent_is_bernstein_like(name, t, u, h):
    """exp(-psi) is completely monotone: alternating finite differences."""
    tc = FAMILIES[name]
    f = np.exp(-tc.laplace_exponent(u + h * np.arange(4), t))
    d1, d2, d3 = np.diff(f), np.diff(f, 2), np.diff(f, 3)
    scale = 1e-12 * max(1.0, f[0])
    assert np.all(d1 <= scale)
    assert np.all(d2 >= -scale)
    assert np.all(d3 <= scale)
