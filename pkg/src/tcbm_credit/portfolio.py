"""One-factor multifirm default model.

Firm ``m`` runs on the clock ``alpha_m G + (1 - alpha_m) H^m`` with a shared
``G`` and independent idiosyncratic ``H^m``. Given ``G_t = y`` the default
indicators are independent Bernoulli variables, so joint default
probabilities and the portfolio loss distribution are one-dimensional
mixtures over the law of ``G_t``.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .brownian import BrownianParams
from .errors import DomainError, LatticeError, NumericalError
from .first_passage import clock_argument, passage_constant, survival_fourier
from .quadrature import QuadratureConfig
from .timechange import TimeChange, combine, cumulants

log = logging.getLogger(__name__)

_ATOM_CUTOFF = 1e-15
_TAIL_EPS = 1e-12
_MAX_THETA_NODES = 1 << 22


@dataclass(frozen=True)
class FirmFactorSpec:
    brownian: BrownianParams
    alpha: float
    idio: TimeChange | None = None
    loss: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.alpha < 1.0 and self.idio is None:
            raise DomainError("an idiosyncratic clock is required when alpha < 1")
        if self.loss < 0:
            raise DomainError("loss weight must be >= 0")
        if self.brownian.x <= 0:
            raise DomainError("firm start level must be > 0")

    def clock(self, common: TimeChange) -> TimeChange:
        """Marginal clock of this firm."""
        return combine([(self.alpha, common), (1.0 - self.alpha, self.idio)])


@dataclass(frozen=True)
class PortfolioSpec:
    common: TimeChange
    firms: tuple[FirmFactorSpec, ...]
    n_y: int = 2048
    k_std: float = 12.0
    loss_unit: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "firms", tuple(self.firms))
        if not self.firms:
            raise DomainError("portfolio needs at least one firm")
        if self.n_y < 16:
            raise DomainError("n_y must be >= 16")
        if self.k_std <= 0:
            raise DomainError("k_std must be > 0")
        if self.loss_unit <= 0:
            raise DomainError("loss_unit must be > 0")


@dataclass(frozen=True)
class MixingLaw:
    """Law of the common clock at the horizon: a tabulated density plus an
    optional point mass. ``weights`` are the cell probabilities attached to
    the ``grid`` nodes, rescaled so that they and the atom sum to 1."""

    grid: np.ndarray
    density: np.ndarray
    atom: tuple[float, float] | None = None
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))
    raw_mass: float = 1.0

    @property
    def degenerate(self) -> bool:
        return self.grid.size == 0

    def nodes(self):
        """All ``(y, weight)`` pairs including the atom."""
        ys, ws = self.grid, self.weights
        if self.atom is not None:
            ys = np.append(ys, self.atom[0])
            ws = np.append(ws, self.atom[1])
        return ys, ws


def conditional_survival(firm: FirmFactorSpec, y, t: float, q: QuadratureConfig = QuadratureConfig()):
    """``F(x, y) = P[survive to t | G_t = y]``; vectorised over ``y``.

    The idiosyncratic clock enters at the calendar horizon ``t``.
    """
    if t <= 0:
        raise DomainError("horizon must be > 0")
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y < 0):
        raise DomainError("common clock value y must be >= 0")
    p = firm.brownian
    a = firm.alpha

    def decay(z):
        v = clock_argument(z, p)
        out = np.exp(-a * v[:, None] * y[None, :])
        if a < 1.0:
            out = out * np.exp(-firm.idio.laplace_exponent((1.0 - a) * v, t))[:, None]
        return out

    fourier = survival_fourier(p, decay, q)
    surv = 1.0 - passage_constant(p) + np.real(fourier)
    tol = max(q.abs_tol, 1e-9)
    if np.any(surv < -tol) or np.any(surv > 1 + tol):
        raise NumericalError("conditional survival outside [0, 1]")
    return np.clip(surv, 0.0, 1.0)


def _theta_limit(phi, scale: float) -> float:
    """Smallest theta (on a geometric scan) beyond which |phi| stays tiny."""
    theta = 1.0 / scale
    quiet = 0
    while theta < 1e9:
        if abs(phi(np.array([theta]))[0]) < _TAIL_EPS:
            quiet += 1
            if quiet >= 3:
                return theta
        else:
            quiet = 0
        theta *= 1.5
    return theta


def _folded_fft(coeffs: np.ndarray, n: int) -> np.ndarray:
    """``sum_k coeffs[k] exp(-2 pi i k j / n)`` for j < n, any len(coeffs)."""
    pad = (-coeffs.size) % n
    folded = np.concatenate([coeffs, np.zeros(pad, dtype=complex)]).reshape(-1, n).sum(axis=0)
    return np.fft.fft(folded)


def mixing_density(common: TimeChange, t: float, n_y: int = 2048, k_std: float = 12.0) -> MixingLaw:
    """Tabulate the law of ``G_t`` by Fourier inversion of ``exp(-psi(-i theta, t))``.

    The grid starts at the deterministic floor of ``G_t`` and spans
    ``k_std`` standard deviations beyond the mean. A point mass, when the
    clock has one, is removed from the transform before inversion and
    returned separately. Deterministic clocks return a pure atom.

    Both the density and the CDF are inverted with the trapezoid rule in
    ``theta`` (one folded FFT each). Mixing weights are the probabilities of
    the cells centred on the grid nodes, which stays accurate when the
    density jumps or blows up at the floor.
    """
    if t <= 0:
        raise DomainError("horizon must be > 0")
    if common.is_deterministic:
        return MixingLaw(np.zeros(0), np.zeros(0), (common.lower_bound(t), 1.0), np.zeros(0))

    atom = common.atom(t)
    if atom is not None and atom[1] < _ATOM_CUTOFF:
        atom = None
    atom_loc, atom_mass = atom if atom is not None else (0.0, 0.0)
    floor = common.lower_bound(t)
    mean = cumulants(common, t, 1)
    sd = math.sqrt(max(cumulants(common, t, 2), 0.0))
    span = mean - floor + k_std * sd
    if not span > 0:
        raise NumericalError("degenerate clock law: zero spread")

    def phi(theta):
        # transform of G_t - floor with the atom removed
        vals = np.exp(-common.laplace_exponent(-1j * theta, t) - 1j * theta * floor)
        if atom_mass:
            vals = vals - atom_mass * np.exp(1j * theta * (atom_loc - floor))
        return vals

    h = span / (n_y - 1)
    half_h = 0.5 * h
    # period n_fft * half_h >= 4 * span keeps aliasing below the tail mass
    n_fft = 1 << int(math.ceil(math.log2(8 * (n_y - 1))))
    d_theta = 2.0 * math.pi / (n_fft * half_h)
    theta_max = _theta_limit(phi, span)
    n_theta = int(math.ceil(theta_max / d_theta)) + 1
    if n_theta > _MAX_THETA_NODES:
        log.warning("clock transform decays slowly; truncating inversion at %d nodes", _MAX_THETA_NODES)
        n_theta = _MAX_THETA_NODES
    theta = d_theta * np.arange(n_theta)
    phis = phi(theta)
    cont_mass = float(np.real(phis[0]))

    dens_coef = phis.copy()
    dens_coef[0] *= 0.5
    dens_fine = np.real(_folded_fft(dens_coef, n_fft))[: 2 * (n_y - 1) + 1] * d_theta / math.pi
    dens = dens_fine[::2]

    # F(y) = (1/pi) int Re[phi (1 - e^{-i theta y}) / (i theta)] d theta
    cdf_coef = np.zeros_like(phis)
    cdf_coef[1:] = phis[1:] / (1j * theta[1:])
    const = np.real(cdf_coef.sum())
    ramp = 0.5 * cont_mass * half_h * np.arange(n_fft)
    cdf_fine = (ramp + const - np.real(_folded_fft(cdf_coef, n_fft))) * d_theta / math.pi
    cdf_fine = cdf_fine[: 2 * (n_y - 1) + 1]

    worst = dens.min()
    if worst < -1e-7:
        log.warning("negative ripples down to %.3e clipped from clock density", worst)
    dens = np.clip(dens, 0.0, None)
    last = cdf_fine.size - 1
    idx = 2 * np.arange(n_y)
    upper = cdf_fine[np.minimum(idx + 1, last)]
    lower = np.where(idx == 0, 0.0, cdf_fine[np.maximum(idx - 1, 0)])
    weights = np.clip(upper - lower, 0.0, None)
    raw_mass = float(weights.sum() + atom_mass)
    if abs(raw_mass - 1.0) > 1e-3:
        raise NumericalError(f"clock law carries mass {raw_mass}, not 1")
    if abs(raw_mass - 1.0) > 1e-5:
        log.warning("clock law mass %.8f differs from 1 by more than 1e-5", raw_mass)
    weights = weights * ((1.0 - atom_mass) / weights.sum())
    return MixingLaw(np.linspace(0.0, span, n_y) + floor, dens, atom, weights, raw_mass)


def _survival_matrix(portfolio: PortfolioSpec, law: MixingLaw, t: float, q: QuadratureConfig):
    ys, ws = law.nodes()
    surv = np.vstack([conditional_survival(f, ys, t, q) for f in portfolio.firms])
    return surv, ws


def joint_default_prob(portfolio: PortfolioSpec, defaulted, t: float,
                       q: QuadratureConfig = QuadratureConfig(), law: MixingLaw | None = None) -> float:
    """Probability that exactly the firms with indices in ``defaulted`` have
    defaulted by ``t``."""
    defaulted = set(defaulted)
    m = len(portfolio.firms)
    if not defaulted <= set(range(m)):
        raise DomainError("defaulted set refers to unknown firms")
    law = law or mixing_density(portfolio.common, t, portfolio.n_y, portfolio.k_std)
    surv, ws = _survival_matrix(portfolio, law, t, q)
    return float(_joint_from_matrix(surv, ws, defaulted))


def _joint_from_matrix(surv, ws, defaulted):
    prod = np.ones(surv.shape[1])
    for i in range(surv.shape[0]):
        prod *= (1.0 - surv[i]) if i in defaulted else surv[i]
    return prod @ ws


def all_joint_default_probs(portfolio: PortfolioSpec, t: float, q: QuadratureConfig = QuadratureConfig()):
    """Map every default set (as a frozenset of indices) to its probability."""
    law = mixing_density(portfolio.common, t, portfolio.n_y, portfolio.k_std)
    surv, ws = _survival_matrix(portfolio, law, t, q)
    m = len(portfolio.firms)
    out = {}
    for r in range(m + 1):
        for combo in itertools.combinations(range(m), r):
            out[frozenset(combo)] = float(_joint_from_matrix(surv, ws, set(combo)))
    return out


def lattice_steps(portfolio: PortfolioSpec) -> np.ndarray:
    """Loss weights expressed as integer multiples of the lattice unit."""
    unit = portfolio.loss_unit
    w = np.array([f.loss for f in portfolio.firms], dtype=float)
    k = np.rint(w / unit)
    if np.any(np.abs(k * unit - w) > 1e-9):
        raise LatticeError(
            f"loss weights {w.tolist()} are not multiples of loss_unit={unit}; "
            "refine the lattice (smaller loss_unit)"
        )
    return k.astype(int)


def loss_distribution(portfolio: PortfolioSpec, t: float, q: QuadratureConfig = QuadratureConfig()):
    """Portfolio loss distribution at horizon ``t``.

    Returns ``(levels, probs)`` with ``levels = loss_unit * arange(K + 1)``.
    Conditional on each mixing node the loss law is built by adding firms one
    at a time (Bernoulli convolution), then mixed over the clock law.
    """
    steps = lattice_steps(portfolio)
    law = mixing_density(portfolio.common, t, portfolio.n_y, portfolio.k_std)
    surv, ws = _survival_matrix(portfolio, law, t, q)
    n_nodes = ws.size
    dist = np.zeros((n_nodes, steps.sum() + 1))
    dist[:, 0] = 1.0
    for i, k in enumerate(steps):
        pd = 1.0 - surv[i][:, None]
        shifted = np.zeros_like(dist)
        shifted[:, k:] = dist[:, : dist.shape[1] - k]
        dist = dist * (1.0 - pd) + shifted * pd
    probs = ws @ dist
    levels = portfolio.loss_unit * np.arange(dist.shape[1])
    return levels, probs
