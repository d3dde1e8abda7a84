"""Closed-form information ratios and turnover for mean-variance and
quintile long-short portfolios.

All quantities are per rebalance period. ``decay`` is one minus the
period-to-period signal autocorrelation ``rho``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .stat_kernels import (
    UniverseStats,
    bvn_rect_prob,
    std_normal_quantile,
    truncated_tail_moments,
)

MEAN_VARIANCE = "mv"
QUINTILE = "quintile"
PORTFOLIO_KINDS = (MEAN_VARIANCE, QUINTILE)


@dataclass(frozen=True)
class SignalStats:
    """IC moments of the alpha model and the signal autocorrelation."""

    mu_ic: float
    v_ic: float
    rho: float = 1.0

    def __post_init__(self) -> None:
        if not abs(self.mu_ic) < 1:
            raise ValueError(f"|mu_ic| must be < 1, got {self.mu_ic}")
        if not 0 <= self.v_ic < 1:
            raise ValueError(f"v_ic must lie in [0, 1), got {self.v_ic}")
        if not self.mu_ic**2 + self.v_ic**2 < 1:
            raise ValueError("mu_ic**2 + v_ic**2 must be < 1")
        if not 0 <= self.rho <= 1:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")

    @property
    def decay(self) -> float:
        return 1.0 - self.rho

    def with_decay(self, decay: float) -> "SignalStats":
        return replace(self, rho=1.0 - decay)


@dataclass(frozen=True)
class CostParams:
    tcost: float = 0.01
    te: float = 0.05

    def __post_init__(self) -> None:
        if not self.tcost >= 0:
            raise ValueError(f"tcost must be >= 0, got {self.tcost}")
        if not self.te > 0:
            raise ValueError(f"te must be > 0, got {self.te}")


@dataclass(frozen=True)
class MetricsRow:
    rho: float
    decay: float
    ir: float
    ir_adj: float
    tr: float


@dataclass(frozen=True)
class QuintileConstants:
    """Coefficients of the quintile spread mean and variance.

    ``spread`` multiplies mu_IC * E(sigma) in the expected spread, ``ic_var``
    multiplies V_IC^2 * E(sigma)^2, and the noise term is
    E(sigma^2) * (noise - shrink * (V_IC^2 + mu_IC^2)) / N.
    """

    spread: float
    ic_var: float
    noise: float
    shrink: float


# Rounded values that reproduce the published quintile tables.
PRINTED_QUINTILE_CONSTANTS = QuintileConstants(spread=2.8, ic_var=7.84, noise=10.0, shrink=7.8)


def exact_quintile_constants() -> QuintileConstants:
    """Unrounded constants from the truncated-normal tail moments at the 80th percentile."""
    mean, var = truncated_tail_moments(0.8)
    return QuintileConstants(
        spread=2.0 * mean,
        ic_var=(2.0 * mean) ** 2,
        noise=10.0,
        shrink=10.0 * (1.0 - var),
    )


def _quintile_constants(exact: bool) -> QuintileConstants:
    return exact_quintile_constants() if exact else PRINTED_QUINTILE_CONSTANTS


def _check_decay(decay: float) -> float:
    if not 0.0 <= decay <= 1.0:
        raise ValueError(f"decay must lie in [0, 1], got {decay}")
    return decay


def _mv_denominator(stats: SignalStats, n: int) -> float:
    return math.sqrt(stats.v_ic**2 + (1.0 - stats.mu_ic**2 - stats.v_ic**2) / n)


def ir_fundamental_law(ic: float, breadth: float) -> float:
    """Classic IR = IC * sqrt(breadth)."""
    if breadth < 0:
        raise ValueError("breadth must be >= 0")
    return ic * math.sqrt(breadth)


def ir_large_n(stats: SignalStats) -> float:
    """IR = mu_IC / V_IC; the N -> infinity limit of :func:`ir_mv`."""
    if stats.v_ic == 0:
        raise ValueError("v_ic must be > 0 for the large-N limit")
    return stats.mu_ic / stats.v_ic


def ir_mv(stats: SignalStats, universe: UniverseStats) -> float:
    return stats.mu_ic / _mv_denominator(stats, universe.n)


def turnover_mv(stats: SignalStats, universe: UniverseStats, costs: CostParams) -> float:
    """One-way turnover per rebalance of the mean-variance portfolio."""
    decay = _check_decay(stats.decay)
    return (
        universe.e_inv_sigma * costs.te * math.sqrt(decay)
        / (math.sqrt(math.pi) * _mv_denominator(stats, universe.n))
    )


def expected_return_mv(stats: SignalStats, universe: UniverseStats, costs: CostParams) -> float:
    return ir_mv(stats, universe) * costs.te


def ir_adj_mv(stats: SignalStats, universe: UniverseStats, costs: CostParams) -> float:
    """Turnover-adjusted IR of the mean-variance portfolio (can be negative)."""
    decay = _check_decay(stats.decay)
    drag = 2.0 * costs.tcost * universe.e_inv_sigma * math.sqrt(decay / math.pi)
    return (stats.mu_ic - drag) / _mv_denominator(stats, universe.n)


def mv_weight(
    signal: float,
    sigma_i: float,
    stats: SignalStats,
    universe: UniverseStats,
    costs: CostParams,
) -> float:
    """Active weight of one security in the tracking-error-targeted portfolio."""
    if not sigma_i > 0:
        raise ValueError(f"sigma_i must be > 0, got {sigma_i}")
    n = universe.n
    return costs.te / _mv_denominator(stats, n) * signal / (n * sigma_i)


def quintile_transition_probs(rho: float) -> tuple[float, float, float]:
    """(P1, P2, P3): short->long, middle->long and short->middle probabilities."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    if rho == 0.0:
        # independent ranks: cell masses are products of the quintile masses
        return 0.2 * 0.2, 0.6 * 0.2, 0.2 * 0.6
    q2 = std_normal_quantile(0.2)
    q8 = std_normal_quantile(0.8)
    inf = math.inf
    p1 = bvn_rect_prob(-inf, q2, q8, inf, rho)
    p2 = bvn_rect_prob(q2, q8, q8, inf, rho)
    p3 = bvn_rect_prob(-inf, q2, q2, q8, rho)
    return p1, p2, p3


def quintile_turnover(rho: float) -> float:
    p1, p2, p3 = quintile_transition_probs(rho)
    return 5.0 * (2.0 * p1 + p2 + p3)


def _quintile_denominator(stats: SignalStats, universe: UniverseStats, c: QuintileConstants) -> float:
    mu2, v2 = stats.mu_ic**2, stats.v_ic**2
    return math.sqrt(
        c.ic_var * v2 * universe.e_sigma**2
        + universe.e_sigma_sq * (c.noise - c.shrink * v2 - c.shrink * mu2) / universe.n
    )


def ir_quintile(stats: SignalStats, universe: UniverseStats, exact_constants: bool = False) -> float:
    """Turnover-neutral IR of the long-short quintile portfolio.

    By default uses the rounded coefficients 2.8 / 7.84 / 7.8 / 10;
    ``exact_constants=True`` switches to the unrounded tail moments.
    """
    c = _quintile_constants(exact_constants)
    return c.spread * stats.mu_ic * universe.e_sigma / _quintile_denominator(stats, universe, c)


def ir_adj_quintile(
    stats: SignalStats,
    universe: UniverseStats,
    costs: CostParams,
    exact_constants: bool = False,
) -> float:
    c = _quintile_constants(exact_constants)
    tr = quintile_turnover(stats.rho)
    numer = c.spread * stats.mu_ic * universe.e_sigma - 2.0 * costs.tcost * tr
    return numer / _quintile_denominator(stats, universe, c)


def theory_row(
    kind: str,
    stats: SignalStats,
    universe: UniverseStats,
    costs: CostParams,
    exact_constants: bool = False,
) -> MetricsRow:
    if kind == MEAN_VARIANCE:
        ir = ir_mv(stats, universe)
        ir_adj = ir_adj_mv(stats, universe, costs)
        tr = turnover_mv(stats, universe, costs)
    elif kind == QUINTILE:
        ir = ir_quintile(stats, universe, exact_constants)
        ir_adj = ir_adj_quintile(stats, universe, costs, exact_constants)
        tr = quintile_turnover(stats.rho)
    else:
        raise ValueError(f"unknown portfolio kind {kind!r}")
    return MetricsRow(rho=stats.rho, decay=stats.decay, ir=ir, ir_adj=ir_adj, tr=tr)


def crossover_decay(
    stats: SignalStats,
    universe: UniverseStats,
    costs: CostParams,
    grid_points: int = 64,
    tol: float = 1e-10,
) -> Optional[float]:
    """Decay at which the mean-variance and quintile turnover-adjusted IRs meet.

    The difference is bracketed on a uniform grid over [0, 1] and the first
    sign change is refined by bisection. Returns None when the difference
    never changes sign.
    """

    def diff(decay: float) -> float:
        s = stats.with_decay(decay)
        return ir_adj_mv(s, universe, costs) - ir_adj_quintile(s, universe, costs)

    grid = np.linspace(0.0, 1.0, grid_points)
    values = [diff(float(d)) for d in grid]
    for i in range(len(grid) - 1):
        a, b = float(grid[i]), float(grid[i + 1])
        fa, fb = values[i], values[i + 1]
        if fa == 0.0:
            if 0.0 < a < 1.0:
                return a
            continue
        if fa * fb < 0:
            while b - a > tol:
                mid = 0.5 * (a + b)
                fm = diff(mid)
                if fm == 0.0:
                    return mid
                if fa * fm < 0:
                    b = mid
                else:
                    a, fa = mid, fm
            return 0.5 * (a + b)
    return None
