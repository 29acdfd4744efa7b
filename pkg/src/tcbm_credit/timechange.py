"""Laplace exponents of random clocks (time changes).

Every family exposes ``laplace_exponent(u, t) = -log E[exp(-u G_t)]`` for
complex ``u`` with ``Re(u) > u_min``. Principal branches are used throughout.
Affine (integrated intensity) families return ``lambda0 * A(u, t) + B(u, t)``.
"""
from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .brownian import BrownianParams
from .errors import DomainError

_NORM_TOL = 1e-12


def _as_u(u):
    u = np.asarray(u)
    if not np.iscomplexobj(u):
        u = u.astype(float)
    return u


class TimeChange(ABC):
    """A nondecreasing random clock with an explicit Laplace exponent."""

    @property
    @abstractmethod
    def u_min(self) -> float:
        """Branch point: the exponent is defined for ``Re(u) > u_min``."""

    @abstractmethod
    def _exponent(self, u, t: float):
        ...

    def laplace_exponent(self, u, t: float):
        """``psi(u, t)``; real for real ``u``, vectorised over ``u``."""
        if t < 0:
            raise DomainError(f"time must be >= 0, got {t}")
        u = _as_u(u)
        if np.any(np.real(u) <= self.u_min):
            raise DomainError(
                f"{type(self).__name__}: Re(u) must exceed u_min={self.u_min}"
            )
        if t == 0:
            return np.zeros_like(u)[()]
        return np.asarray(self._exponent(u, float(t)))[()]

    def lower_bound(self, t: float) -> float:
        """Deterministic floor of ``G_t`` (its drift part)."""
        return 0.0

    def atom(self, t: float) -> tuple[float, float] | None:
        """``(location, mass)`` of a point mass in the law of ``G_t``, if any."""
        return None

    @property
    def is_deterministic(self) -> bool:
        return False


def _check_nonneg(name, value):
    if not (np.isfinite(value) and value >= 0):
        raise DomainError(f"{name} must be >= 0, got {value}")


def _check_pos(name, value):
    if not (np.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be > 0, got {value}")


def _check_normalized(name, mean_rate):
    if abs(mean_rate - 1.0) > _NORM_TOL:
        raise DomainError(f"{name} marked normalized but its mean rate is {mean_rate!r}")


@dataclass(frozen=True)
class DeterministicClock(TimeChange):
    """``G_t = rate * t``. Also used for constant short rates."""

    rate: float = 1.0

    def __post_init__(self):
        _check_nonneg("rate", self.rate)

    @property
    def u_min(self):
        return -math.inf

    def _exponent(self, u, t):
        return self.rate * u * t

    def lower_bound(self, t):
        return self.rate * t

    def atom(self, t):
        return (self.rate * t, 1.0)

    @property
    def is_deterministic(self):
        return True


@dataclass(frozen=True)
class ExponentialSubordinator(TimeChange):
    """Drift ``b`` plus compound Poisson jumps with Levy density ``a c e^{-az}``."""

    a: float
    b: float
    c: float
    normalized: bool = False

    def __post_init__(self):
        _check_pos("a", self.a)
        _check_nonneg("b", self.b)
        _check_nonneg("c", self.c)
        if self.normalized:
            _check_normalized("ExponentialSubordinator", self.b + self.c / self.a)

    @property
    def u_min(self):
        return -self.a

    def _exponent(self, u, t):
        return t * (self.b * u + u * self.c / (self.a + u))

    def lower_bound(self, t):
        return self.b * t

    def atom(self, t):
        # no jump before t with probability exp(-c t)
        return (self.b * t, math.exp(-self.c * t))

    @property
    def is_deterministic(self):
        return self.c == 0


@dataclass(frozen=True)
class GammaSubordinator(TimeChange):
    """Drift ``b`` plus a gamma process with Levy density ``c e^{-az} / z``."""

    a: float
    b: float
    c: float
    normalized: bool = False

    def __post_init__(self):
        _check_pos("a", self.a)
        _check_nonneg("b", self.b)
        _check_pos("c", self.c)
        if self.normalized:
            _check_normalized("GammaSubordinator", self.b + self.c / self.a)

    @property
    def u_min(self):
        return -self.a

    def _exponent(self, u, t):
        return t * (self.b * u + self.c * np.log1p(u / self.a))

    def lower_bound(self, t):
        return self.b * t


@dataclass(frozen=True)
class IGSubordinator(TimeChange):
    """Inverse Gaussian clock: hitting time of level ``gamma_tilde * t`` by a
    unit Brownian motion with drift ``beta_tilde``.

    The exponent is ``gamma_tilde t (sqrt(beta_tilde^2 + 2u) - beta_tilde)``,
    which vanishes at ``u = 0``.
    """

    beta_tilde: float
    gamma_tilde: float
    normalized: bool = False

    def __post_init__(self):
        _check_pos("beta_tilde", self.beta_tilde)
        _check_pos("gamma_tilde", self.gamma_tilde)
        if self.normalized:
            _check_normalized("IGSubordinator", self.gamma_tilde / self.beta_tilde)

    @property
    def u_min(self):
        return -0.5 * self.beta_tilde**2

    def _exponent(self, u, t):
        bt = self.beta_tilde
        root = np.sqrt(bt**2 + 2.0 * u)
        # sqrt(bt^2 + 2u) - bt without cancellation
        return self.gamma_tilde * t * 2.0 * u / (root + bt)


@dataclass(frozen=True)
class IntegratedCIR(TimeChange):
    """``int_0^t lambda_s ds`` for ``d lambda = (a - b lambda) dt + sqrt(2 c lambda) dW``."""

    a: float
    b: float
    c: float
    lambda0: float
    normalized: bool = False

    def __post_init__(self):
        _check_pos("a", self.a)
        _check_pos("b", self.b)
        _check_pos("c", self.c)
        _check_nonneg("lambda0", self.lambda0)
        if self.normalized:
            _check_normalized("IntegratedCIR", self.a / self.b)

    @property
    def u_min(self):
        return -self.b**2 / (4.0 * self.c)

    def affine_parts(self, u, t):
        """Return ``(A, B)`` with ``psi = lambda0 * A + B``."""
        u = _as_u(u)
        a, b, c = self.a, self.b, self.c
        gamma = np.sqrt(b * b + 4.0 * u * c)
        kappa2 = -2.0 * u / (gamma + b)  # (b - gamma) / (2c)
        one_minus_e = -np.expm1(-gamma * t)
        e = 1.0 - one_minus_e
        # (1 + (c/gamma) kappa1 (e^{gamma t} - 1)) = e^{gamma t} * s
        s = 1.0 - (2.0 * u * c / (gamma * (gamma + b))) * one_minus_e
        a_part = -kappa2 + kappa2 * e / s
        b_part = -a * kappa2 * t + (a / c) * np.log(s)
        return a_part, b_part

    def _exponent(self, u, t):
        a_part, b_part = self.affine_parts(u, t)
        return self.lambda0 * a_part + b_part


@dataclass(frozen=True)
class IntegratedOUJump(TimeChange):
    """``int_0^t lambda_s ds`` for ``d lambda = -b~ lambda dt + dJ`` with ``J`` the
    exponential subordinator ``(a~, 0, c~)``."""

    a_tilde: float
    b_tilde: float
    c_tilde: float
    lambda0: float
    normalized: bool = False

    def __post_init__(self):
        _check_pos("a_tilde", self.a_tilde)
        _check_pos("b_tilde", self.b_tilde)
        _check_pos("c_tilde", self.c_tilde)
        _check_nonneg("lambda0", self.lambda0)
        if self.normalized:
            _check_normalized(
                "IntegratedOUJump", self.c_tilde / (self.a_tilde * self.b_tilde)
            )

    @property
    def u_min(self):
        return -self.a_tilde * self.b_tilde

    def affine_parts(self, u, t):
        u = _as_u(u)
        at, bt, ct = self.a_tilde, self.b_tilde, self.c_tilde
        a_part = (u / bt) * (-np.expm1(-bt * t))
        k = at * bt + u
        # log(((ab + u) e^{bt} - u) / (ab)) = b t + log1p(u (1 - e^{-bt}) / (ab))
        log_term = bt * t + np.log1p(u * (-np.expm1(-bt * t)) / (at * bt))
        b_part = ct * t - (at * ct / k) * log_term
        return a_part, b_part

    def _exponent(self, u, t):
        a_part, b_part = self.affine_parts(u, t)
        return self.lambda0 * a_part + b_part

    def lower_bound(self, t):
        return self.lambda0 * (-math.expm1(-self.b_tilde * t)) / self.b_tilde


@dataclass(frozen=True)
class ConvexCombination(TimeChange):
    """``G_t = sum_i w_i G^i_t`` for independent parts, weights summing to 1."""

    parts: tuple[tuple[float, TimeChange], ...] = field(default=())

    def __post_init__(self):
        parts = tuple((float(w), tc) for w, tc in self.parts)
        object.__setattr__(self, "parts", parts)
        if not parts:
            raise DomainError("ConvexCombination needs at least one part")
        for w, _ in parts:
            if not 0.0 <= w <= 1.0:
                raise DomainError(f"weights must lie in [0, 1], got {w}")
        total = sum(w for w, _ in parts)
        if abs(total - 1.0) > 1e-12:
            raise DomainError(f"weights must sum to 1, got {total}")

    @property
    def active(self):
        return [(w, tc) for w, tc in self.parts if w > 0]

    @property
    def u_min(self):
        return max(tc.u_min / w for w, tc in self.active)

    def _exponent(self, u, t):
        return sum(tc.laplace_exponent(w * u, t) for w, tc in self.active)

    def lower_bound(self, t):
        return sum(w * tc.lower_bound(t) for w, tc in self.active)

    def atom(self, t):
        loc, mass = 0.0, 1.0
        for w, tc in self.active:
            at = tc.atom(t)
            if at is None:
                return None
            loc += w * at[0]
            mass *= at[1]
        return (loc, mass)

    @property
    def is_deterministic(self):
        return all(tc.is_deterministic for _, tc in self.active)


def combine(parts: Sequence[tuple[float, TimeChange | None]]) -> TimeChange:
    """Convex combination skipping zero-weight parts; collapses a single part."""
    active = [(w, tc) for w, tc in parts if w > 0]
    if any(tc is None for _, tc in active):
        raise DomainError("a part with positive weight has no time change")
    if len(active) == 1 and abs(active[0][0] - 1.0) <= 1e-12:
        return active[0][1]
    return ConvexCombination(tuple(active))


def laplace_exponent(tc: TimeChange, u, t: float):
    return tc.laplace_exponent(u, t)


def _derivatives_at_zero(tc: TimeChange, t: float, orders: int, n: int = 64):
    """Taylor derivatives of ``psi(., t)`` at 0 by the Cauchy integral on a circle.

    The circle stays inside the analyticity disc ``|u| < |u_min|``, so the
    trapezoid rule converges geometrically.
    """
    radius = 0.25 * min(abs(tc.u_min), 1.0) if math.isfinite(tc.u_min) else 0.25
    theta = 2.0 * np.pi * np.arange(n) / n
    nodes = radius * np.exp(1j * theta)
    vals = tc.laplace_exponent(nodes, t)
    coeffs = np.fft.fft(vals) / n
    return [
        float(np.real(coeffs[k]) * math.factorial(k) / radius**k)
        for k in range(1, orders + 1)
    ]


def cumulants(tc: TimeChange, t: float, k: int):
    """k-th cumulant of ``G_t`` for k in 1..4."""
    if k not in (1, 2, 3, 4):
        raise DomainError("cumulant order must be 1, 2, 3 or 4")
    if t <= 0:
        raise DomainError("cumulants require t > 0")
    deriv = _derivatives_at_zero(tc, t, k)[k - 1]
    # log E[e^{-uG}] = -psi(u) = sum kappa_k (-u)^k / k!
    return (-1) ** (k + 1) * deriv


def mean_rate(tc: TimeChange, t: float) -> float:
    """``E[G_t] / t``."""
    if t <= 0:
        raise DomainError("mean_rate requires t > 0")
    return cumulants(tc, t, 1) / t


def tcbm_char_fn(tc: TimeChange, p: BrownianParams, u, t: float):
    """``E[exp(i u (L_t - L_0))]`` for ``L_t = X_{G_t}``."""
    u = np.asarray(u, dtype=float)
    arg = p.sigma**2 * (0.5 * u**2 - 1j * p.beta * u)
    return np.exp(-tc.laplace_exponent(arg, t))[()]
