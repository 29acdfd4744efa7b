import math

import numpy as np
import pytest

from tcbm_credit import QuadratureConfig
from tcbm_credit.errors import DomainError, QuadratureError
from tcbm_credit.quadrature import iterated_average, oscillatory_integral


def test_dirichlet_integral():
    val = oscillatory_integral(lambda z: np.sinc(z / np.pi), math.pi)
    assert val == pytest.approx(math.pi / 2, abs=1e-9)


@pytest.mark.parametrize("x, b", [(0.3, 0.5), (1.5, 0.5), (2.0, 0.01)])
def test_slowly_decaying_sine_kernel(x, b):
    val = oscillatory_integral(lambda z: z * np.sin(z * x) / (z * z + b * b), math.pi / x)
    assert val == pytest.approx(0.5 * math.pi * math.exp(-b * x), abs=1e-9)


def test_cosine_panels_with_offset_break():
    a = 3.0
    val = oscillatory_integral(lambda z: np.cos(a * z) * np.exp(-z * z), math.pi / a,
                               first_break=0.5 * math.pi / a)
    assert val == pytest.approx(0.5 * math.sqrt(math.pi) * math.exp(-a * a / 4), abs=1e-12)


def test_vector_and_complex_integrands():
    bs = np.array([0.2, 1.0, 3.0])

    def f(z):
        return (np.sin(z) * np.exp(1j * 0.0 * z))[:, None] / (z[:, None] + bs[None, :] + 1.0)

    vals = oscillatory_integral(f, math.pi)
    for b, v in zip(bs, vals):
        single = oscillatory_integral(lambda z: np.sin(z) / (z + b + 1.0), math.pi)
        assert v == pytest.approx(single, abs=1e-9)


def test_divergent_integral_raises():
    with pytest.raises(QuadratureError):
        oscillatory_integral(lambda z: z * np.sin(z), math.pi, QuadratureConfig(max_panels=200))


def test_iterated_average_accelerates_alternating_series():
    n = np.arange(1, 40)
    partial = np.cumsum((-1.0) ** (n + 1) / n)
    assert abs(partial[-1] - math.log(2)) > 1e-2
    assert iterated_average(partial, 12) == pytest.approx(math.log(2), abs=1e-9)


def test_config_validation():
    with pytest.raises(DomainError):
        QuadratureConfig(abs_tol=0.0)
    with pytest.raises(DomainError):
        QuadratureConfig(max_panels=3)
    with pytest.raises(DomainError):
        oscillatory_integral(np.sin, 0.0)
