"""Single-firm structural credit model on a time-changed log-leverage ratio.

The clock is ``alpha1 * G1 + alpha2 * G2 + alpha3 * G3`` with ``G1`` an
integrated CIR intensity, ``G2`` an integrated OU-jump intensity and ``G3`` a
Levy subordinator. The short rate is ``r~ + m1 lambda1 + m2 lambda2``, default
is the passage time of the second kind, and recovery is a fixed fraction of
an otherwise identical treasury bond.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .brownian import BrownianParams
from .errors import DomainError, NumericalError, QuadratureError
from .first_passage import check_probability, clock_argument, survival_fourier
from .quadrature import QuadratureConfig
from .timechange import (
    DeterministicClock,
    ExponentialSubordinator,
    GammaSubordinator,
    IGSubordinator,
    IntegratedCIR,
    IntegratedOUJump,
    TimeChange,
    combine,
)

LEVY_FAMILIES = (ExponentialSubordinator, GammaSubordinator, IGSubordinator, DeterministicClock)
DEFAULT_LEG_FACTORS = ("treasury", "printed")


@dataclass(frozen=True)
class FirmCredit:
    """Full credit description of one firm.

    ``rate_base`` is the independent short-rate component ``r~``; an
    ``IntegratedCIR`` whose ``lambda0`` is the initial rate, or a
    ``DeterministicClock`` for a constant rate. ``default_leg`` selects the
    CDS default-leg factor: ``"treasury"`` uses ``1 - R``; ``"printed"`` uses
    ``(1 - R) / R``.
    """

    brownian: BrownianParams
    alphas: tuple[float, float, float] = (0.0, 0.0, 1.0)
    tc1: IntegratedCIR | None = None
    tc2: IntegratedOUJump | None = None
    tc3: TimeChange | None = None
    rate_base: TimeChange = field(default_factory=lambda: DeterministicClock(0.0))
    m1: float = 0.0
    m2: float = 0.0
    recovery: float = 0.0
    default_leg: str = "treasury"

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if self.brownian.beta >= 0:
            raise DomainError("firm requires beta < 0")
        if len(self.alphas) != 3 or any(not 0.0 <= a <= 1.0 for a in self.alphas):
            raise DomainError("alphas must be three weights in [0, 1]")
        if abs(sum(self.alphas) - 1.0) > 1e-12:
            raise DomainError(f"alphas must sum to 1, got {sum(self.alphas)}")
        if self.m1 < 0 or self.m2 < 0:
            raise DomainError("rate loadings m1, m2 must be >= 0")
        if not 0.0 <= self.recovery < 1.0:
            raise DomainError("recovery must lie in [0, 1)")
        if self.tc1 is not None and not isinstance(self.tc1, IntegratedCIR):
            raise DomainError("tc1 must be an IntegratedCIR")
        if self.tc2 is not None and not isinstance(self.tc2, IntegratedOUJump):
            raise DomainError("tc2 must be an IntegratedOUJump")
        if self.tc3 is not None and not isinstance(self.tc3, LEVY_FAMILIES):
            raise DomainError("tc3 must be a Levy subordinator")
        for i, (alpha, m, tc) in enumerate(
            [(self.alphas[0], self.m1, self.tc1), (self.alphas[1], self.m2, self.tc2),
             (self.alphas[2], 0.0, self.tc3)], start=1
        ):
            if (alpha > 0 or m > 0) and tc is None:
                raise DomainError(f"tc{i} is required when its weight or rate loading is positive")
        if not isinstance(self.rate_base, (IntegratedCIR, DeterministicClock)):
            raise DomainError("rate_base must be an IntegratedCIR or a DeterministicClock")
        if self.default_leg not in DEFAULT_LEG_FACTORS:
            raise DomainError(f"default_leg must be one of {DEFAULT_LEG_FACTORS}")

    @property
    def time_change(self) -> TimeChange:
        return combine(list(zip(self.alphas, (self.tc1, self.tc2, self.tc3))))

    def with_x(self, x: float) -> "FirmCredit":
        return replace(self, brownian=self.brownian.with_x(x))


def _rate_exponent(firm: FirmCredit, T: float) -> float:
    """``psi^{r~}(1, T) + sum_i psi^(i)(m_i, T)``."""
    total = float(firm.rate_base.laplace_exponent(1.0, T))
    if firm.m1 > 0:
        total += float(firm.tc1.laplace_exponent(firm.m1, T))
    if firm.m2 > 0:
        total += float(firm.tc2.laplace_exponent(firm.m2, T))
    return total


def default_probability(firm: FirmCredit, t: float, q: QuadratureConfig = QuadratureConfig()) -> float:
    """``P[t2 <= t]`` under the combined clock."""
    if t < 0:
        raise DomainError("t must be >= 0")
    if t == 0:
        return 0.0
    p = firm.brownian
    parts = [(a, tc) for a, tc in zip(firm.alphas, (firm.tc1, firm.tc2, firm.tc3)) if a > 0]

    def decay(z):
        v = clock_argument(z, p)
        return np.exp(-sum(tc.laplace_exponent(a * v, t) for a, tc in parts))

    surv = survival_fourier(p, decay, q)
    return float(check_probability(1.0 - surv, q.abs_tol, "default probability"))


def riskfree_bond(firm: FirmCredit, T: float) -> float:
    """Default-free zero coupon bond price ``P_0(T)``."""
    if T < 0:
        raise DomainError("maturity must be >= 0")
    if T == 0:
        return 1.0
    return math.exp(-_rate_exponent(firm, T))


def zero_recovery_bond(firm: FirmCredit, T: float, q: QuadratureConfig = QuadratureConfig()) -> float:
    """Zero-recovery defaultable zero coupon bond ``E[exp(-int r) 1{T < t2}]``."""
    if T < 0:
        raise DomainError("maturity must be >= 0")
    if T == 0:
        return 1.0
    p = firm.brownian
    a1, a2, a3 = firm.alphas
    rate_part = float(firm.rate_base.laplace_exponent(1.0, T))

    def decay(z):
        v = clock_argument(z, p)
        expo = np.zeros_like(v)
        if firm.tc1 is not None and (a1 > 0 or firm.m1 > 0):
            expo = expo + firm.tc1.laplace_exponent(firm.m1 + a1 * v, T)
        if firm.tc2 is not None and (a2 > 0 or firm.m2 > 0):
            expo = expo + firm.tc2.laplace_exponent(firm.m2 + a2 * v, T)
        if a3 > 0:
            expo = expo + firm.tc3.laplace_exponent(a3 * v, T)
        return np.exp(-expo)

    value = math.exp(-rate_part) * survival_fourier(p, decay, q)
    ceiling = riskfree_bond(firm, T)
    if value < -q.abs_tol or value > ceiling + q.abs_tol:
        raise NumericalError(f"zero recovery bond {value} outside [0, {ceiling}]")
    return float(min(max(value, 0.0), ceiling))


def recovery_bond(firm: FirmCredit, T: float, q: QuadratureConfig = QuadratureConfig()) -> float:
    """Defaultable bond with fractional recovery of treasury."""
    r = firm.recovery
    return (1.0 - r) * zero_recovery_bond(firm, T, q) + r * riskfree_bond(firm, T)


def _simpson(values: np.ndarray, h: float) -> float:
    return h / 3.0 * (values[0] + values[-1] + 4.0 * values[1:-1:2].sum() + 2.0 * values[2:-1:2].sum())


def premium_leg(firm: FirmCredit, T: float, n_time_steps: int = 64,
                q: QuadratureConfig = QuadratureConfig(), max_steps: int = 4096) -> float:
    """Unit-rate premium leg ``V(T) = int_0^T P0bar(t) dt`` by composite Simpson,
    doubling the node count until successive values agree to 1e-8 relative."""
    if T <= 0:
        raise DomainError("CDS maturity must be > 0")
    n = n_time_steps + (n_time_steps % 2)
    cache: dict[float, float] = {}

    def at(t):
        key = round(t, 14)
        if key not in cache:
            cache[key] = zero_recovery_bond(firm, t, q)
        return cache[key]

    def simpson(n):
        ts = np.linspace(0.0, T, n + 1)
        return _simpson(np.array([at(t) for t in ts]), T / n)

    prev = simpson(n)
    while n < max_steps:
        n *= 2
        cur = simpson(n)
        if abs(cur - prev) < 1e-8 * abs(cur):
            return cur
        prev = cur
    raise QuadratureError(f"premium leg did not settle with {max_steps} Simpson steps")


def default_leg(firm: FirmCredit, T: float, q: QuadratureConfig = QuadratureConfig()) -> float:
    """Default leg value ``W(T)``."""
    diff = riskfree_bond(firm, T) - zero_recovery_bond(firm, T, q)
    r = firm.recovery
    if firm.default_leg == "printed":
        if r == 0:
            raise DomainError("the (1-R)/R default-leg factor is undefined for R = 0")
        return (1.0 - r) / r * diff
    return (1.0 - r) * diff


def cds_legs(firm: FirmCredit, T: float, n_time_steps: int = 64,
             q: QuadratureConfig = QuadratureConfig()) -> tuple[float, float]:
    """``(V(T), W(T))``: unit premium leg and default leg values."""
    return premium_leg(firm, T, n_time_steps, q), default_leg(firm, T, q)


def cds_spread(firm: FirmCredit, T: float, n_time_steps: int = 64,
               q: QuadratureConfig = QuadratureConfig()) -> float:
    """Par spread ``S = W / V``."""
    v, w = cds_legs(firm, T, n_time_steps, q)
    return w / v


def yield_spread(firm: FirmCredit, T: float, q: QuadratureConfig = QuadratureConfig()) -> float:
    """Zero-recovery yield spread ``-(1/T) log(P0bar(T) / P0(T))``."""
    if T <= 0:
        raise DomainError("maturity must be > 0")
    ratio = zero_recovery_bond(firm, T, q) / riskfree_bond(firm, T)
    if ratio <= 0:
        return math.inf
    return -math.log(ratio) / T
