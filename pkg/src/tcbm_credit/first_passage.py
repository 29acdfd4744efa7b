"""First passage of the second kind for time-changed Brownian motion.

For ``L_t = X_{G_t}`` the passage time of the second kind is the first time the
clock ``G`` overtakes the Brownian passage time ``t*``. Its distribution and
the survival densities reduce to Fourier integrals against
``exp(-psi(sigma^2 (z^2 + beta^2) / 2, t))``.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .brownian import BrownianParams, fp_cdf
from .errors import DomainError, NumericalError, QuadratureError
from .quadrature import QuadratureConfig, oscillatory_integral
from .timechange import TimeChange

SMALL_X = 1e-10
_DENSITY_TOL = 1e-6


def clock_argument(z, p: BrownianParams):
    """Laplace argument ``sigma^2 (z^2 + beta^2) / 2`` fed to the clock."""
    return 0.5 * p.sigma**2 * (np.asarray(z) ** 2 + p.beta**2)


def survival_fourier(
    p: BrownianParams,
    decay: Callable[[np.ndarray], np.ndarray],
    q: QuadratureConfig,
):
    """``(e^{-beta x}/pi) int_R z sin(zx)/(z^2+beta^2) decay(z) dz``.

    ``decay`` must be even in ``z`` and may return a trailing axis, in which
    case a vector of integrals is returned. The integral over R is twice the
    integral over the half line.
    """
    x, beta = p.x, p.beta

    def integrand(z):
        kernel = z * np.sin(z * x) / (z * z + beta * beta)
        d = decay(z)
        if d.ndim > 1:
            kernel = kernel[:, None]
        return kernel * d

    half = oscillatory_integral(integrand, math.pi / x, q)
    return 2.0 * math.exp(-beta * x) * half / math.pi


def passage_constant(p: BrownianParams) -> float:
    """Total passage probability of the Brownian passage time (t* < inf)."""
    return math.exp(-2.0 * p.beta * p.x) if p.beta > 0 else 1.0


def check_probability(value, tol: float, what: str):
    """Clip roundoff just outside [0, 1]; reject anything further out."""
    value = np.asarray(value, dtype=float)
    if np.any(value < -tol) or np.any(value > 1.0 + tol) or np.any(~np.isfinite(value)):
        raise NumericalError(f"{what} outside [0, 1] beyond tolerance: {value}")
    return np.clip(value, 0.0, 1.0)[()]


def fp2_cdf(t: float, p: BrownianParams, tc: TimeChange, q: QuadratureConfig = QuadratureConfig()):
    """``P[t2 <= t]`` for the first passage time of the second kind."""
    if t < 0:
        raise DomainError("t must be >= 0")
    if p.x <= 0:
        raise DomainError("x must be > 0")
    if t == 0:
        return 0.0
    if p.x <= SMALL_X:
        return 1.0
    surv = survival_fourier(
        p, lambda z: np.exp(-tc.laplace_exponent(clock_argument(z, p), t)), q
    )
    return float(check_probability(passage_constant(p) - surv, q.abs_tol, "fp2_cdf"))


def _cos_transform(t, p, tc, freq, q):
    """``int_0^inf cos(freq z) exp(-psi(sigma^2 (z^2+beta^2)/2, t)) dz``."""

    def decay(z):
        return np.exp(-tc.laplace_exponent(clock_argument(z, p), t))

    freq = abs(freq)
    if freq < 1e-12:
        from scipy.integrate import quad

        val, err = quad(lambda z: float(decay(np.array([z]))[0]), 0, np.inf, limit=500)
        if not np.isfinite(val) or err > 1e3 * q.abs_tol:
            raise QuadratureError("non-oscillatory transform did not converge")
        return val
    half = math.pi / freq
    return oscillatory_integral(
        lambda z: np.cos(freq * z) * decay(z), half, q, first_break=0.5 * half
    )


def defaultable_density(t: float, ell: float, p: BrownianParams, tc: TimeChange, q=QuadratureConfig()):
    """Density in ``ell`` of ``{t < t2, L_t in d ell}``; zero for ``ell <= 0``."""
    if t <= 0:
        raise DomainError("t must be > 0")
    if p.x <= 0:
        raise DomainError("x must be > 0")
    if ell <= 0:
        return 0.0
    i_minus = _cos_transform(t, p, tc, ell - p.x, q)
    i_plus = _cos_transform(t, p, tc, ell + p.x, q)
    val = math.exp(p.beta * (ell - p.x)) * (i_minus - i_plus) / math.pi
    if val < -_DENSITY_TOL:
        raise NumericalError(f"negative survival density {val}")
    return max(val, 0.0)


def defaulted_density(t: float, ell: float, p: BrownianParams, tc: TimeChange, q=QuadratureConfig()):
    """Density in ``ell`` of ``{t >= t2, L_t in d ell}``."""
    if t <= 0:
        raise DomainError("t must be > 0")
    if p.x <= 0:
        raise DomainError("x must be > 0")
    i_image = _cos_transform(t, p, tc, p.x + abs(ell), q)
    val = math.exp(p.beta * (ell - p.x)) * i_image / math.pi
    if val < -_DENSITY_TOL:
        raise NumericalError(f"negative defaulted density {val}")
    return max(val, 0.0)


def unconstrained_density(t: float, ell: float, p: BrownianParams, tc: TimeChange, q=QuadratureConfig()):
    """Density of ``L_t`` ignoring default (same Fourier kernel family)."""
    i_direct = _cos_transform(t, p, tc, ell - p.x, q)
    return math.exp(p.beta * (ell - p.x)) * i_direct / math.pi


def survival_char_fn(k: complex, t: float, p: BrownianParams, tc: TimeChange, q=QuadratureConfig()):
    """``E[1{t < t2} exp(-beta L_t + i k L_t)]`` for ``Im(k) > 0``."""
    k = complex(k)
    if k.imag <= 0:
        raise DomainError("k must lie in the upper half plane")
    if p.x <= 0:
        raise DomainError("x must be > 0")
    if t < 0:
        raise DomainError("t must be >= 0")
    if t == 0:
        return complex(np.exp((-p.beta + 1j * k) * p.x))
    x = p.x

    def integrand(z):
        return z * np.sin(z * x) / (z * z - k * k) * np.exp(
            -tc.laplace_exponent(clock_argument(z, p), t)
        )

    half = oscillatory_integral(integrand, math.pi / x, q)
    return complex(2.0 * math.exp(-p.beta * x) * half / math.pi)


def fp2_cdf_by_density(
    t: float,
    p: BrownianParams,
    grid: np.ndarray,
    density: np.ndarray,
    q: QuadratureConfig = QuadratureConfig(),
    atom: tuple[float, float] | None = None,
):
    """``int_0^inf P(t* <= y) rho_t(y) dy`` from a tabulated clock density.

    ``density`` is sampled on the increasing ``grid``; an optional point mass
    ``atom = (location, mass)`` is added. The supplied law must carry unit
    mass within 1e-6.
    """
    grid = np.asarray(grid, dtype=float)
    density = np.asarray(density, dtype=float)
    if grid.shape != density.shape or grid.ndim != 1:
        raise DomainError("grid and density must be 1-d arrays of equal length")
    mass = np.trapezoid(density, grid) if grid.size > 1 else 0.0
    atom_mass = atom[1] if atom else 0.0
    if abs(mass + atom_mass - 1.0) > 1e-6:
        raise DomainError(f"clock density is not normalised (mass {mass + atom_mass})")
    cdf = np.zeros_like(grid)
    pos = grid > 0
    if np.any(pos):
        cdf[pos] = fp_cdf(grid[pos], p)
    val = np.trapezoid(cdf * density, grid) if grid.size > 1 else 0.0
    if atom and atom[1] > 0 and atom[0] > 0:
        val += atom[1] * fp_cdf(atom[0], p)
    return float(check_probability(val, max(q.abs_tol, 1e-6), "fp2_cdf_by_density"))
