"""First passage of drifting Brownian motion to zero.

The process is ``X_t = x + sigma W_t + beta sigma^2 t``. Everything here is
closed form and vectorised over the time/level argument.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr, ndtr

from .errors import DomainError


@dataclass(frozen=True)
class BrownianParams:
    """Drifting Brownian motion started at ``x``.

    Attributes
    ----------
    x : float
        Initial level (log-leverage). Must be positive for passage problems.
    sigma : float
        Volatility per unit of (business) time.
    beta : float
        Drift coefficient; the drift is ``beta * sigma**2``.
    """

    x: float
    sigma: float
    beta: float

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma <= 0:
            raise DomainError(f"sigma must be > 0, got {self.sigma}")
        if not (np.isfinite(self.x) and np.isfinite(self.beta)):
            raise DomainError("x and beta must be finite")

    @property
    def drift(self) -> float:
        return self.beta * self.sigma**2

    def with_x(self, x: float) -> "BrownianParams":
        return BrownianParams(x, self.sigma, self.beta)


def _require_positive_x(p: BrownianParams):
    if p.x <= 0:
        raise DomainError(f"first passage requires x > 0, got x={p.x}")


def _image_term(log_weight, z):
    # weight * N(z) evaluated as exp(log weight + log N(z)); avoids inf * 0
    return np.exp(log_weight + log_ndtr(z))


def fp_cdf(t, p: BrownianParams):
    """P[t* <= t] for the first passage time t* of X to zero."""
    _require_positive_x(p)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("fp_cdf requires t > 0")
    s = p.sigma * np.sqrt(t)
    mu = p.drift * t
    out = ndtr((-p.x - mu) / s) + _image_term(-2.0 * p.beta * p.x, (-p.x + mu) / s)
    return np.clip(out, 0.0, 1.0)[()]


def fp_laplace_exponent(u, p: BrownianParams):
    """-log E[exp(-u t*) 1{t* < inf}] = x (beta + sqrt(beta^2 + 2u/sigma^2))."""
    u = np.asarray(u, dtype=float)
    bound = -0.5 * p.beta**2 * p.sigma**2
    if np.any(u <= bound):
        raise DomainError(f"u must exceed {bound} (branch point of the square root)")
    return (p.x * (p.beta + np.sqrt(p.beta**2 + 2.0 * u / p.sigma**2)))[()]


def survival_level_joint(t, ell, p: BrownianParams):
    """P[t* > t, X_t >= ell] for ell >= 0."""
    _require_positive_x(p)
    if t <= 0:
        raise DomainError("survival_level_joint requires t > 0")
    ell = np.asarray(ell, dtype=float)
    if np.any(ell < 0):
        raise DomainError("level ell must be >= 0")
    s = p.sigma * np.sqrt(t)
    mu = p.drift * t
    out = ndtr((p.x - ell + mu) / s) - _image_term(-2.0 * p.beta * p.x, (-p.x - ell + mu) / s)
    return np.clip(out, 0.0, 1.0)[()]


def survival_level_density(t, ell, p: BrownianParams):
    """Density in ``ell`` of {t* > t, X_t in d ell} (image method)."""
    _require_positive_x(p)
    ell = np.asarray(ell, dtype=float)
    s = p.sigma * np.sqrt(t)
    mu = p.drift * t
    direct = np.exp(-0.5 * ((ell - p.x - mu) / s) ** 2)
    image = np.exp(-2.0 * p.beta * p.x - 0.5 * ((ell + p.x - mu) / s) ** 2)
    out = (direct - image) / (s * np.sqrt(2.0 * np.pi))
    return np.where(ell > 0, out, 0.0)[()]


def heat_kernel(x, variance):
    """Centred Gaussian density with the given variance."""
    x = np.asarray(x, dtype=float)
    return (np.exp(-0.5 * x**2 / variance) / np.sqrt(2.0 * np.pi * variance))[()]


def heat_kernel_contour(x: float, variance: float, shift: float, n: int = 401) -> float:
    """Evaluate the Gaussian kernel as a Fourier integral along Im z = shift.

    ``(1/2pi) int exp(-i z x - z^2 variance / 2) dz`` over the line
    ``R + i*shift``. Used as a self-test of the contour-shift identity that
    underlies the density formulas.
    """
    half_width = np.sqrt(2.0 * 40.0 / variance) + abs(shift)
    z_re = np.linspace(-half_width, half_width, n)
    z = z_re + 1j * shift
    vals = np.exp(-1j * z * x - 0.5 * z**2 * variance)
    # trapezoid on a Gaussian integrand converges geometrically
    return float(np.real(np.trapezoid(vals, z_re)) / (2.0 * np.pi))
