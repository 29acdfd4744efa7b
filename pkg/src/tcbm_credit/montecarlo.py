"""Monte Carlo ground truth for the analytic modules.

Clocks are simulated with exact marginals wherever possible: Levy clocks by
exact increments between the requested times, the CIR intensity by exact
noncentral chi-square transitions (its integral by the trapezoid rule on a
``dt`` grid) and the OU-jump intensity exactly, jump by jump. Brownian passage
times are drawn by inverting the closed-form CDF.

Randomness is split into fixed-size chunks of paths, each with its own
``SeedSequence`` child, so results do not depend on how chunks are scheduled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .brownian import BrownianParams, fp_cdf
from .credit import FirmCredit
from .errors import DomainError, NumericalError
from .first_passage import passage_constant
from .portfolio import PortfolioSpec, lattice_steps
from .timechange import (
    ConvexCombination,
    DeterministicClock,
    ExponentialSubordinator,
    GammaSubordinator,
    IGSubordinator,
    IntegratedCIR,
    IntegratedOUJump,
    TimeChange,
)

CHUNK = 1 << 16
BLOCK = 64
PAYOFFS = ("zero_recovery_bond", "recovery_bond", "cds_default_leg")


@dataclass(frozen=True)
class SimConfig:
    seed: int = 12345
    n_paths: int = 100_000
    dt: float = 1.0 / 250.0
    antithetic: bool = False

    def __post_init__(self):
        if self.n_paths < 1:
            raise DomainError("n_paths must be >= 1")
        if not self.dt > 0:
            raise DomainError("dt must be > 0")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class MCResult:
    estimate: np.ndarray
    stderr: np.ndarray
    n: int

    def z_score(self, analytic):
        diff = np.asarray(analytic) - self.estimate
        se = np.where(self.stderr > 0, self.stderr, np.nan)
        z = diff / se
        # a zero standard error only certifies exact agreement
        return np.where(self.stderr > 0, z, np.where(np.abs(diff) < 1e-12, 0.0, np.inf))


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def _chunks(n: int, size: int) -> Iterator[tuple[int, int]]:
    for i, start in enumerate(range(0, n, size)):
        yield i, min(size, n - start)


class _Accumulator:
    """Running sums for means and standard errors, reduced in fixed order."""

    def __init__(self):
        self.n = 0
        self.s1 = 0.0
        self.s2 = 0.0

    def add(self, samples: np.ndarray):
        self.n += samples.shape[0]
        self.s1 = self.s1 + samples.sum(axis=0)
        self.s2 = self.s2 + (np.abs(samples) ** 2).sum(axis=0)

    def result(self) -> MCResult:
        mean = self.s1 / self.n
        if self.n > 1:
            var = (self.s2 - self.n * np.abs(mean) ** 2) / (self.n - 1)
            se = np.sqrt(np.maximum(var, 0.0) / self.n)
        else:
            se = np.zeros_like(np.abs(mean))
        return MCResult(np.asarray(mean), np.asarray(se), self.n)


# ---------------------------------------------------------------- clocks

def sample_subordinator_increment(tc: TimeChange, dt, rng: np.random.Generator, size=None):
    """Exact increments of a Levy clock over intervals of length ``dt``."""
    dt = np.asarray(dt, dtype=float)
    shape = dt.shape if size is None else np.broadcast_shapes(dt.shape, tuple(np.atleast_1d(size)))
    dt_b = np.broadcast_to(dt, shape)
    if isinstance(tc, DeterministicClock):
        return tc.rate * dt_b
    if isinstance(tc, GammaSubordinator):
        jumps = np.where(dt_b > 0, rng.gamma(np.maximum(tc.c * dt_b, 1e-300), 1.0 / tc.a), 0.0)
        return tc.b * dt_b + jumps
    if isinstance(tc, ExponentialSubordinator):
        counts = rng.poisson(tc.c * dt_b)
        return tc.b * dt_b + rng.gamma(counts, 1.0 / tc.a)
    if isinstance(tc, IGSubordinator):
        level = tc.gamma_tilde * dt_b
        safe = np.maximum(level, 1e-150)
        draws = rng.wald(safe / tc.beta_tilde, safe**2)
        return np.where(level > 0, draws, 0.0)
    raise DomainError(f"no increment sampler for {type(tc).__name__}")


class ClockStepper:
    """Advance a clock over successive intervals, keeping intensity state.

    ``block(spans)`` returns the clock increments over consecutive intervals
    of the given lengths, shape ``(n, len(spans))``.
    """

    def __init__(self, tc: TimeChange, rng: np.random.Generator, n: int, dt: float):
        self.tc, self.rng, self.n, self.dt = tc, rng, n, dt
        self.parts = None
        if isinstance(tc, ConvexCombination):
            self.parts = [(w, ClockStepper(part, rng, n, dt)) for w, part in tc.active]
        elif isinstance(tc, (IntegratedCIR, IntegratedOUJump)):
            self.lam = np.full(n, float(tc.lambda0))

    def block(self, spans) -> np.ndarray:
        spans = np.asarray(spans, dtype=float)
        if self.parts is not None:
            return sum(w * s.block(spans) for w, s in self.parts)
        if isinstance(self.tc, IntegratedCIR):
            return np.stack([self._cir_step(h) for h in spans], axis=1)
        if isinstance(self.tc, IntegratedOUJump):
            return np.stack([self._ou_step(h) for h in spans], axis=1)
        return sample_subordinator_increment(self.tc, np.broadcast_to(spans, (self.n, spans.size)), self.rng)

    def _cir_step(self, span):
        tc, acc = self.tc, np.zeros(self.n)
        if span <= 0:
            return acc
        n_sub = max(1, int(math.ceil(span / self.dt - 1e-9)))
        h = span / n_sub
        decay = math.exp(-tc.b * h)
        scale = tc.c * (1.0 - decay) / (2.0 * tc.b)
        df = 2.0 * tc.a / tc.c
        lam = self.lam
        for _ in range(n_sub):
            new = scale * self.rng.noncentral_chisquare(df, lam * decay / scale)
            acc += 0.5 * h * (lam + new)
            lam = new
        self.lam = lam
        return acc

    def _ou_step(self, span):
        tc, n = self.tc, self.n
        b = tc.b_tilde
        if span <= 0:
            return np.zeros(n)
        decay = math.exp(-b * span)
        acc = self.lam * (1.0 - decay) / b
        lam = self.lam * decay
        counts = self.rng.poisson(tc.c_tilde * span, n)
        total = int(counts.sum())
        if total:
            owner = np.repeat(np.arange(n), counts)
            remaining = span - self.rng.uniform(0.0, span, total)
            size = self.rng.exponential(1.0 / tc.a_tilde, total)
            acc = acc + np.bincount(owner, size * (-np.expm1(-b * remaining)) / b, minlength=n)
            lam = lam + np.bincount(owner, size * np.exp(-b * remaining), minlength=n)
        self.lam = lam
        return acc


def sample_clock(tc: TimeChange, times, rng: np.random.Generator, n: int, dt: float = 1.0 / 250.0):
    """Values of ``G`` at the increasing ``times``; shape ``(n, len(times))``."""
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or np.any(np.diff(times) < 0) or np.any(times < 0):
        raise DomainError("times must be a nondecreasing 1-d array of nonnegative values")
    spans = np.diff(np.concatenate([[0.0], times]))
    return np.cumsum(ClockStepper(tc, rng, n, dt).block(spans), axis=1)


def sample_integrated_intensity(tc: TimeChange, t: float, dt: float, rng: np.random.Generator, n_paths: int = 1):
    """Path of ``int_0^s lambda`` on the grid ``0, dt, ..., t``."""
    if not isinstance(tc, (IntegratedCIR, IntegratedOUJump)):
        raise DomainError("sample_integrated_intensity needs a CIR or OU-jump intensity")
    steps = max(1, int(round(t / dt)))
    times = np.linspace(0.0, t, steps + 1)
    return times, sample_clock(tc, times, rng, n_paths, dt)


# ---------------------------------------------------------------- Brownian passage

def t_star_from_uniform(p: BrownianParams, u: np.ndarray) -> np.ndarray:
    """Invert the passage-time CDF at ``u`` (``inf`` beyond the total mass)."""
    if p.x <= 0:
        raise DomainError("x must be > 0")
    u = np.asarray(u, dtype=float)
    out = np.full(u.shape, np.inf)
    finite = u < passage_constant(p)
    target = u[finite]
    if target.size == 0:
        return out
    lo = np.full(target.shape, 1e-16)
    hi = np.ones(target.shape)
    low_side = fp_cdf(hi, p) < target
    while np.any(low_side):
        hi[low_side] *= 4.0
        if hi.max() > 1e15:
            raise NumericalError("t* root finder failed to bracket")
        low_side = fp_cdf(hi, p) < target
    for _ in range(200):
        mid = np.sqrt(lo * hi)
        below = fp_cdf(mid, p) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= 1e-12 * hi):
            break
    out[finite] = hi
    return out


def sample_t_star(p: BrownianParams, rng: np.random.Generator, size=None):
    """Draw the Brownian first passage time to zero (possibly ``inf``)."""
    return t_star_from_uniform(p, rng.random(size))


def _paired_uniforms(rng, n, antithetic):
    if not antithetic:
        return rng.random(n)[:, None]
    return np.stack([u := rng.random(n), 1.0 - u], axis=1)


# ---------------------------------------------------------------- estimators

def mc_fp2(tc: TimeChange, p: BrownianParams, t_grid, sim: SimConfig = SimConfig()) -> MCResult:
    """CDF of the passage time of the second kind on ``t_grid``.

    ``t2 <= t`` exactly when ``G_t >= t*``, so the estimate is exact in
    distribution at the grid times for Levy clocks.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    acc = _Accumulator()
    n_units = sim.n_paths // 2 if sim.antithetic else sim.n_paths
    for i, m in _chunks(max(n_units, 1), CHUNK):
        rng = chunk_rng(sim.seed, i)
        clock = sample_clock(tc, t_grid, rng, m, sim.dt)
        u = _paired_uniforms(rng, m, sim.antithetic)
        tstar = t_star_from_uniform(p, u)
        hits = (clock[:, None, :] >= tstar[:, :, None]).mean(axis=1)
        acc.add(hits)
    return acc.result()


def mc_laplace(tc: TimeChange, u, t: float, sim: SimConfig = SimConfig()) -> MCResult:
    """``E[exp(-u G_t)]`` for each ``u``."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    acc = _Accumulator()
    for i, m in _chunks(sim.n_paths, CHUNK):
        g = sample_clock(tc, [t], chunk_rng(sim.seed, i), m, sim.dt)[:, 0]
        acc.add(np.exp(-np.outer(g, u)))
    return acc.result()


def mc_clock_samples(tc: TimeChange, t: float, sim: SimConfig = SimConfig()) -> np.ndarray:
    """``n_paths`` draws of ``G_t``."""
    parts = [sample_clock(tc, [t], chunk_rng(sim.seed, i), m, sim.dt)[:, 0]
             for i, m in _chunks(sim.n_paths, CHUNK)]
    return np.concatenate(parts)


def mc_char_fn(tc: TimeChange, p: BrownianParams, u: float, t: float, sim: SimConfig = SimConfig()) -> MCResult:
    """``E[exp(i u (L_t - L_0))]``; the standard error is the modulus SE."""
    acc = _Accumulator()
    for i, m in _chunks(sim.n_paths, CHUNK):
        rng = chunk_rng(sim.seed, i)
        g = sample_clock(tc, [t], rng, m, sim.dt)[:, 0]
        move = p.drift * g + p.sigma * np.sqrt(g) * rng.standard_normal(m)
        acc.add(np.exp(1j * u * move))
    return acc.result()


def mc_survival_char_fn(k: complex, t: float, p: BrownianParams, tc: TimeChange,
                        sim: SimConfig = SimConfig()) -> MCResult:
    """``E[1{t < t2} exp(-beta L_t + i k L_t)]`` via the Brownian-bridge
    survival weight given the endpoint ``X_{G_t}``."""
    acc = _Accumulator()
    for i, m in _chunks(sim.n_paths, CHUNK):
        rng = chunk_rng(sim.seed, i)
        g = sample_clock(tc, [t], rng, m, sim.dt)[:, 0]
        end = p.x + p.drift * g + p.sigma * np.sqrt(g) * rng.standard_normal(m)
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            cross = np.exp(-2.0 * p.x * end / (p.sigma**2 * g))
        weight = np.where(end > 0, 1.0 - np.where(g > 0, cross, 0.0), 0.0)
        acc.add(weight * np.exp((-p.beta + 1j * k) * end))
    return acc.result()


@dataclass(frozen=True)
class PassagePairs:
    times: np.ndarray
    t1: np.ndarray
    t2: np.ndarray


def mc_fp1_vs_fp2(tc: TimeChange, p: BrownianParams, t_grid, sim: SimConfig = SimConfig()) -> PassagePairs:
    """Paired passage times of the first and second kind on a monitoring grid.

    ``X`` is sampled at the realised clock values; ``t1`` is the first grid
    time with ``X_{G} <= 0``. ``t2`` is the first grid time at which ``X``
    has crossed zero at any business time up to ``G`` (Brownian-bridge
    crossing between clock values), so ``t2 <= t1`` holds path by path.
    Paths that never cross report ``inf``.
    """
    times = np.asarray(t_grid, dtype=float)
    if times[0] != 0.0:
        times = np.concatenate([[0.0], times])
    spans = np.diff(times)
    t1_all, t2_all = [], []
    s2 = p.sigma**2
    for i, m in _chunks(sim.n_paths, CHUNK):
        rng = chunk_rng(sim.seed, i)
        stepper = ClockStepper(tc, rng, m, sim.dt)
        x = np.full(m, p.x)
        t1 = np.full(m, np.inf)
        t2 = np.full(m, np.inf)
        for lo in range(0, spans.size, BLOCK):
            d_g = stepper.block(spans[lo:lo + BLOCK])
            path = x[:, None] + np.cumsum(
                p.drift * d_g + p.sigma * np.sqrt(d_g) * rng.standard_normal(d_g.shape), axis=1)
            prev = np.concatenate([x[:, None], path[:, :-1]], axis=1)
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                bridge = np.exp(-2.0 * prev * path / (s2 * d_g))
            bridge = np.where((d_g > 0) & (prev > 0) & (path > 0), bridge, 0.0)
            below = path <= 0
            crossed = below | (rng.random(d_g.shape) < bridge)
            block_times = times[lo + 1:lo + 1 + d_g.shape[1]]
            t1 = np.minimum(t1, _first_time(below, block_times))
            t2 = np.minimum(t2, _first_time(crossed, block_times))
            x = path[:, -1]
        t1_all.append(t1)
        t2_all.append(t2)
    t1 = np.concatenate(t1_all)
    t2 = np.concatenate(t2_all)
    if np.any(t2 > t1):
        raise NumericalError("passage time ordering t2 <= t1 violated")
    return PassagePairs(times, t1, t2)


def _first_time(flags, times):
    idx = np.argmax(flags, axis=1)
    return np.where(flags.any(axis=1), times[idx], np.inf)


def mc_price(firm: FirmCredit, payoff: str, T: float, sim: SimConfig = SimConfig()) -> MCResult:
    """Joint simulation of rates, intensities, clock and ``t*``.

    The default leg uses the tower property: paying ``(1-R) P_{t2}(T)`` at
    default is worth ``E[(1-R) exp(-int_0^T r) 1{t2 <= T}]``.
    """
    if payoff not in PAYOFFS:
        raise DomainError(f"payoff must be one of {PAYOFFS}")
    if T < 0:
        raise DomainError("maturity must be >= 0")
    a1, a2, a3 = firm.alphas
    R = firm.recovery
    acc = _Accumulator()
    n_units = sim.n_paths // 2 if sim.antithetic else sim.n_paths
    for i, m in _chunks(max(n_units, 1), CHUNK):
        rng = chunk_rng(sim.seed, i)
        rate_int = sample_clock(firm.rate_base, [T], rng, m, sim.dt)[:, 0]
        g = np.zeros(m)
        if firm.tc1 is not None and (a1 > 0 or firm.m1 > 0):
            g1 = sample_clock(firm.tc1, [T], rng, m, sim.dt)[:, 0]
            rate_int = rate_int + firm.m1 * g1
            g = g + a1 * g1
        if firm.tc2 is not None and (a2 > 0 or firm.m2 > 0):
            g2 = sample_clock(firm.tc2, [T], rng, m, sim.dt)[:, 0]
            rate_int = rate_int + firm.m2 * g2
            g = g + a2 * g2
        if a3 > 0:
            g = g + a3 * sample_clock(firm.tc3, [T], rng, m, sim.dt)[:, 0]
        discount = np.exp(-rate_int)[:, None]
        tstar = t_star_from_uniform(firm.brownian, _paired_uniforms(rng, m, sim.antithetic))
        alive = (g[:, None] < tstar).astype(float)
        if payoff == "zero_recovery_bond":
            value = discount * alive
        elif payoff == "recovery_bond":
            value = discount * (alive + R * (1.0 - alive))
        else:
            value = (1.0 - R) * discount * (1.0 - alive)
        acc.add(value.mean(axis=1))
    return acc.result()


def mc_default_indicators(portfolio: PortfolioSpec, t: float, sim: SimConfig = SimConfig()) -> Iterator[np.ndarray]:
    """Yield chunks of joint default indicators, shape ``(m, n_firms)``."""
    for i, m in _chunks(sim.n_paths, CHUNK):
        rng = chunk_rng(sim.seed, i)
        common = sample_clock(portfolio.common, [t], rng, m, sim.dt)[:, 0]
        flags = np.zeros((m, len(portfolio.firms)), dtype=bool)
        for j, firm in enumerate(portfolio.firms):
            clock = firm.alpha * common
            if firm.alpha < 1.0:
                clock = clock + (1.0 - firm.alpha) * sample_clock(firm.idio, [t], rng, m, sim.dt)[:, 0]
            flags[:, j] = clock >= sample_t_star(firm.brownian, rng, m)
        yield flags


def mc_loss_distribution(portfolio: PortfolioSpec, t: float, sim: SimConfig = SimConfig()):
    """Empirical portfolio loss distribution on the loss lattice."""
    steps = lattice_steps(portfolio)
    counts = np.zeros(steps.sum() + 1)
    for flags in mc_default_indicators(portfolio, t, sim):
        counts += np.bincount(flags.astype(int) @ steps, minlength=counts.size)
    return portfolio.loss_unit * np.arange(counts.size), counts / counts.sum()


def mc_joint_default(portfolio: PortfolioSpec, defaulted, t: float, sim: SimConfig = SimConfig()) -> MCResult:
    """Probability that exactly the firms in ``defaulted`` default by ``t``."""
    defaulted = set(defaulted)
    mask = np.array([j in defaulted for j in range(len(portfolio.firms))])
    acc = _Accumulator()
    for flags in mc_default_indicators(portfolio, t, sim):
        acc.add(np.all(flags == mask, axis=1).astype(float))
    return acc.result()
