"""Integrated alpha signals: one-lag blends and EWMA combinations.

Blending the current signal with its lags lowers the IC but raises the
autocorrelation, so the turnover drag falls. The functions here give the
IC scaling and effective autocorrelation of the blended signal, the
resulting turnover-adjusted IR and a scalar optimizer for the blend
parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analytics import (
    MEAN_VARIANCE,
    QUINTILE,
    CostParams,
    SignalStats,
    ir_adj_mv,
    ir_adj_quintile,
)
from .stat_kernels import UniverseStats

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OneLagBlend:
    """A_t = w1 * x_t + (1 - w1) * x_{t-1}."""

    w1: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.w1 <= 1.0:
            raise ValueError(f"w1 must lie in [0, 1], got {self.w1}")

    @property
    def w2(self) -> float:
        return 1.0 - self.w1


@dataclass(frozen=True)
class EwmaBlend:
    """A_t = sum_j (1 - lam) * lam**j * x_{t-j}."""

    lam: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.lam < 1.0:
            raise ValueError(f"lambda must lie in [0, 1), got {self.lam}")


@dataclass(frozen=True)
class OptimizationResult:
    argmax: float
    max_value: float
    interior: bool


def _one_lag_var(blend: OneLagBlend, rho: float) -> float:
    w1, w2 = blend.w1, blend.w2
    return w1 * w1 + 2.0 * w1 * w2 * rho + w2 * w2


def one_lag_ic_scale(blend: OneLagBlend, rho: float) -> float:
    """Factor applied to mu_IC and V_IC of the one-lag blended signal."""
    return (blend.w1 + blend.w2 * rho) / math.sqrt(_one_lag_var(blend, rho))


def one_lag_autocorr(blend: OneLagBlend, rho: float) -> float:
    w1, w2 = blend.w1, blend.w2
    cov = w1 * w1 * rho + w1 * w2 * rho * rho + w1 * w2 + w2 * w2 * rho
    return cov / _one_lag_var(blend, rho)


def _scaled(stats: SignalStats, scale: float, rho: float) -> SignalStats:
    # clamp guards 1 + 1e-16 style rounding in the autocorrelation
    return SignalStats(stats.mu_ic * scale, stats.v_ic * scale, min(1.0, max(0.0, rho)))


def _ir_adj(kind: str, stats: SignalStats, universe: UniverseStats, costs: CostParams) -> float:
    if kind == MEAN_VARIANCE:
        return ir_adj_mv(stats, universe, costs)
    if kind == QUINTILE:
        return ir_adj_quintile(stats, universe, costs)
    raise ValueError(f"unknown portfolio kind {kind!r}")


def ir_adj_one_lag(
    blend: OneLagBlend,
    stats: SignalStats,
    universe: UniverseStats,
    costs: CostParams,
    kind: str = MEAN_VARIANCE,
) -> float:
    scale = one_lag_ic_scale(blend, stats.rho)
    blended = _scaled(stats, scale, one_lag_autocorr(blend, stats.rho))
    return _ir_adj(kind, blended, universe, costs)


def ewma_autocorr_printed(blend: EwmaBlend, rho: float) -> float:
    """(lam + rho) / (1 + lam + rho), evaluated literally.

    Kept for reference only: it does not reduce to rho at lam = 0 and is
    not used by any IR computation. See :func:`ewma_autocorr`.
    """
    return (blend.lam + rho) / (1.0 + blend.lam + rho)


def ewma_autocorr(blend: EwmaBlend, rho: float) -> float:
    """Lag-one autocorrelation of an EWMA of a unit AR(1) signal: (lam + rho) / (1 + lam*rho)."""
    lam = blend.lam
    return (lam + rho) / (1.0 + lam * rho)


def ewma_effective_decay(blend: EwmaBlend, rho: float) -> float:
    """1 - ewma_autocorr = (1 - lam)(1 - rho) / (1 + lam*rho)."""
    lam = blend.lam
    return (1.0 - lam) * (1.0 - rho) / (1.0 + lam * rho)


def ewma_variance(blend: EwmaBlend, rho: float) -> float:
    lam = blend.lam
    if lam * rho >= 1.0:
        raise ValueError("lambda * rho must be < 1")
    return (1.0 - lam) * (1.0 + lam * rho) / ((1.0 + lam) * (1.0 - lam * rho))


def ewma_ic_scale(blend: EwmaBlend, rho: float) -> float:
    lam = blend.lam
    if lam * rho >= 1.0:
        raise ValueError("lambda * rho must be < 1")
    return math.sqrt((1.0 - lam * lam) / (1.0 - lam * lam * rho * rho))


def ir_adj_mv_ewma(
    blend: EwmaBlend,
    stats: SignalStats,
    universe: UniverseStats,
    costs: CostParams,
) -> float:
    """Turnover-adjusted IR of a mean-variance portfolio built on the EWMA signal."""
    lam, rho, n = blend.lam, stats.rho, universe.n
    mu2, v2 = stats.mu_ic**2, stats.v_ic**2
    drag = (
        2.0 * costs.tcost * universe.e_inv_sigma
        * math.sqrt((1.0 - rho) / math.pi)
        * math.sqrt((1.0 - lam * rho) / (1.0 + lam))
    )
    denom = math.sqrt(v2 - (mu2 + v2) / n + (1.0 - lam * lam * rho * rho) / (n * (1.0 - lam * lam)))
    return (stats.mu_ic - drag) / denom


def ewma_blended_stats(blend: EwmaBlend, stats: SignalStats) -> SignalStats:
    """IC-scaled moments and autocorrelation of the EWMA signal."""
    scale = ewma_ic_scale(blend, stats.rho)
    return _scaled(stats, scale, 1.0 - ewma_effective_decay(blend, stats.rho))


def ir_adj_quintile_ewma(
    blend: EwmaBlend,
    stats: SignalStats,
    universe: UniverseStats,
    costs: CostParams,
) -> float:
    return ir_adj_quintile(ewma_blended_stats(blend, stats), universe, costs)


def ir_adj_ewma(
    blend: EwmaBlend,
    stats: SignalStats,
    universe: UniverseStats,
    costs: CostParams,
    kind: str = MEAN_VARIANCE,
) -> float:
    if kind == MEAN_VARIANCE:
        return ir_adj_mv_ewma(blend, stats, universe, costs)
    if kind == QUINTILE:
        return ir_adj_quintile_ewma(blend, stats, universe, costs)
    raise ValueError(f"unknown portfolio kind {kind!r}")


def ewma_derivative_numerator(
    blend: EwmaBlend,
    stats: SignalStats,
    universe: UniverseStats,
    costs: CostParams,
) -> float:
    """Numerator of d/dlam of :func:`ir_adj_mv_ewma`, up to a positive factor.

    With k = V^2 - (mu^2 + V^2)/N, m = 2 Tcost E(1/sigma)/sqrt(pi),
    S = 1 - x^2 p^2 + k N (1 - x^2), x = lam and p = rho the expression is

        m (1+p) sqrt(1-p) / (2 (1+x)^1.5 sqrt(1-xp)) * sqrt(S)
        - x (1 - p^2) / (sqrt(S) (1 - x^2)) * (mu - m sqrt(1-p) sqrt(1-xp) / sqrt(1+x))

    which is the derivative times sqrt(N (1 - x^2)) times the squared
    denominator of the IR.
    """
    x, p, n = blend.lam, stats.rho, universe.n
    if not 0.0 < x < 1.0:
        raise ValueError(f"lambda must lie strictly inside (0, 1), got {x}")
    mu, v2 = stats.mu_ic, stats.v_ic**2
    k = v2 - (mu * mu + v2) / n
    m = 2.0 * costs.tcost * universe.e_inv_sigma / math.sqrt(math.pi)
    s = 1.0 - x * x * p * p + k * n * (1.0 - x * x)
    first = m * (1.0 + p) * math.sqrt(1.0 - p) / (2.0 * (1.0 + x) ** 1.5 * math.sqrt(1.0 - x * p)) * math.sqrt(s)
    numer = mu - m * math.sqrt(1.0 - p) * math.sqrt(1.0 - x * p) / math.sqrt(1.0 + x)
    second = x * (1.0 - p * p) / (math.sqrt(s) * (1.0 - x * x)) * numer
    return first - second


def eq20_derivative_sign(
    blend: EwmaBlend,
    stats: SignalStats,
    universe: UniverseStats,
    costs: CostParams,
) -> int:
    """Sign (-1, 0, +1) of the slope of the EWMA mean-variance IR at lam."""
    return int(np.sign(ewma_derivative_numerator(blend, stats, universe, costs)))


def _golden_max(f: Callable[[float], float], a: float, b: float, tol: float) -> tuple[float, float]:
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def optimize_blend(
    objective: Callable[[float], float],
    lo: float,
    hi: float,
    grid_points: int = 1024,
    tol: float = 1e-6,
) -> OptimizationResult:
    """Maximize a scalar objective on [lo, hi].

    A uniform grid locates the best bracket, golden-section search refines
    it. Ties go to the lowest grid point; a maximum on an endpoint is
    reported with ``interior=False``.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got ({lo}, {hi})")
    grid = np.linspace(lo, hi, grid_points)
    values = np.array([objective(float(g)) for g in grid])
    i = int(np.argmax(values))
    best_x, best_v = float(grid[i]), float(values[i])

    a = float(grid[max(i - 1, 0)])
    b = float(grid[min(i + 1, grid_points - 1)])
    x, v = _golden_max(objective, a, b, tol)
    if v > best_v:
        best_x, best_v = x, v

    interior = lo + tol < best_x < hi - tol
    return OptimizationResult(argmax=best_x, max_value=best_v, interior=interior)


def optimize_one_lag(
    stats: SignalStats,
    universe: UniverseStats,
    costs: CostParams,
    kind: str = MEAN_VARIANCE,
) -> OptimizationResult:
    """Best weight on the current signal, w1 in [0, 1]."""
    return optimize_blend(
        lambda w: ir_adj_one_lag(OneLagBlend(w), stats, universe, costs, kind), 0.0, 1.0
    )


def optimize_ewma(
    stats: SignalStats,
    universe: UniverseStats,
    costs: CostParams,
    kind: str = MEAN_VARIANCE,
    lam_max: float = 0.999,
) -> OptimizationResult:
    """Best EWMA factor lambda in [0, lam_max]."""
    return optimize_blend(
        lambda lam: ir_adj_ewma(EwmaBlend(lam), stats, universe, costs, kind), 0.0, lam_max
    )
