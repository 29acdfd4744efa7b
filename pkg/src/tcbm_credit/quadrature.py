"""Half-period panel quadrature for oscillatory Fourier integrals on [0, inf).

Panels run between consecutive zeros of the oscillating factor. Each panel is
integrated with 15-point Gauss-Legendre (bisected where the rule disagrees
with itself), and the slowly convergent alternating sequence of partial sums
is accelerated by iterated averaging.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, QuadratureError

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(15)
_MAX_BISECT = 30
_MAX_SUBINTERVALS = 2000


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-9
    max_panels: int = 4000
    acceleration_order: int = 10

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise DomainError("abs_tol must be > 0")
        if self.max_panels < 10:
            raise DomainError("max_panels must be >= 10")
        if self.acceleration_order < 1:
            raise DomainError("acceleration_order must be >= 1")


def _gl(f, lo, hi):
    """15-point rule on many intervals at once; returns shape (n_int, ...)."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    z = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    vals = np.asarray(f(z))
    vals = vals.reshape((lo.size, _GL_NODES.size) + vals.shape[1:])
    w = _GL_WEIGHTS.reshape((1, -1) + (1,) * (vals.ndim - 2))
    return half.reshape((-1,) + (1,) * (vals.ndim - 2)) * np.sum(w * vals, axis=1)


def _panel_integrals(f, lo, hi, tol):
    """Integrate ``f`` on each [lo_i, hi_i], bisecting panels that fail a
    whole-vs-halves comparison."""
    whole = _gl(f, lo, hi)
    mid = 0.5 * (lo + hi)
    halves = _gl(f, np.concatenate([lo, mid]), np.concatenate([mid, hi]))
    n = lo.size
    refined = halves[:n] + halves[n:]
    err = np.abs(refined - whole)
    if err.ndim > 1:
        err = err.reshape(n, -1).max(axis=1)
    out = refined
    bad = np.nonzero(err > tol)[0]
    for i in bad:
        out[i] = _adaptive(f, lo[i], hi[i], whole[i], tol, 0)
    return out


def _adaptive(f, lo, hi, estimate, tol, depth):
    """Bisect [lo, hi] until halves agree with the parent to ``tol`` (or to
    roundoff), within a fixed budget of subintervals."""
    total = 0.0
    stack = [(lo, hi, estimate, tol, depth)]
    budget = _MAX_SUBINTERVALS
    while stack:
        a, b, est, t, d = stack.pop()
        mid = 0.5 * (a + b)
        left = _gl(f, np.array([a]), np.array([mid]))[0]
        right = _gl(f, np.array([mid]), np.array([b]))[0]
        refined = left + right
        gap = np.max(np.abs(refined - est))
        floor = 64.0 * np.finfo(float).eps * np.max(np.abs(refined))
        if gap <= max(t, floor) or d >= _MAX_BISECT:
            total = total + refined
            continue
        budget -= 1
        if budget <= 0:
            raise QuadratureError(f"panel [{lo:.6g}, {hi:.6g}] needs more than "
                                  f"{_MAX_SUBINTERVALS} subintervals")
        stack.append((mid, b, right, 0.5 * t, d + 1))
        stack.append((a, mid, left, 0.5 * t, d + 1))
    return total


def iterated_average(partial_sums: np.ndarray, levels: int) -> np.ndarray:
    """Apply ``levels`` rounds of neighbour averaging to a sequence of partial
    sums (along axis 0); returns the last accelerated value."""
    s = np.asarray(partial_sums)
    for _ in range(levels):
        s = 0.5 * (s[1:] + s[:-1])
    return s[-1]


def oscillatory_integral(
    f: Callable[[np.ndarray], np.ndarray],
    half_period: float,
    cfg: QuadratureConfig = QuadratureConfig(),
    first_break: float | None = None,
):
    """``int_0^inf f(z) dz`` where ``f`` changes sign every ``half_period``.

    Parameters
    ----------
    f : callable
        Vectorised integrand. May return complex values and may carry trailing
        axes (vector-valued integrals); convergence is judged on the worst
        component.
    half_period : float
        Spacing of the sign changes of the oscillating factor.
    first_break : float, optional
        Location of the first zero (defaults to ``half_period``, as for
        ``sin``; use ``half_period / 2`` for ``cos``).

    Raises
    ------
    QuadratureError
        If neither the raw partial sums nor their accelerated limit settle
        within ``cfg.max_panels`` panels.
    """
    if not half_period > 0 or not np.isfinite(half_period):
        raise DomainError("half_period must be positive and finite")
    first = half_period if first_break is None else first_break
    tol = cfg.abs_tol
    panel_tol = tol * 1e-3
    order = cfg.acceleration_order

    terms = []
    total = 0.0
    n_done = 0
    batch = 16
    accel_prev = None
    while n_done < cfg.max_panels:
        k = np.arange(n_done, min(n_done + batch, cfg.max_panels))
        lo = np.where(k == 0, 0.0, first + (k - 1) * half_period)
        hi = first + k * half_period
        vals = _panel_integrals(f, lo, hi, panel_tol)
        terms.extend(vals)
        n_done = k[-1] + 1
        batch = min(2 * batch, 256)

        arr = np.asarray(terms)
        partial = np.cumsum(arr, axis=0)
        total = partial[-1]
        last = np.max(np.abs(arr[-2:]))
        if last < 0.05 * tol:
            return total
        # averaging also "sums" divergent alternating series; demand decay
        mid = len(arr) // 2
        shrinking = last <= np.max(np.abs(arr[mid:mid + 2]))
        if n_done > order + 4 and shrinking:
            accel = iterated_average(partial, order)
            accel_shift = iterated_average(partial[:-1], order)
            diff = np.max(np.abs(accel - accel_shift))
            if diff < 0.05 * tol and (
                accel_prev is None or np.max(np.abs(accel - accel_prev)) < tol
            ):
                return accel
            accel_prev = accel
    raise QuadratureError(
        f"oscillatory integral did not converge in {cfg.max_panels} panels "
        f"(last panel magnitude {float(np.max(np.abs(terms[-1]))):.3e})"
    )
