"""Monte Carlo check of the closed-form IR, IR' and turnover.

One repetition draws an IC series, a log-normal cross-section of specific
volatilities, an AR(1) signal panel and the implied returns, builds
mean-variance or quintile long-short weights, and reports the time-series
IR, the IR net of proportional trading costs and the mean turnover.

Random streams
--------------
Repetition ``r`` of a run seeded with ``seed`` draws from
``numpy.random.Generator(Philox(SeedSequence([seed, r])))``. Philox is a
counter-based generator, so every repetition has its own independent
stream and results do not depend on how repetitions are scheduled across
workers. Within a repetition the draw order is fixed: IC series
(``periods``), volatilities (``n``), initial signals (``n``), signal
innovations (``n x periods``), return noise (``n x periods``).

Array layout: signals and weights are ``(n, periods + 1)`` with column 0
holding t = 0; returns are ``(n, periods)`` aligned with columns 1..periods.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.signal import lfilter

from .analytics import MEAN_VARIANCE, PORTFOLIO_KINDS, QUINTILE, CostParams, SignalStats
from .stat_kernels import LogNormalVolModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimulationConfig:
    stats: SignalStats = field(default_factory=lambda: SignalStats(0.05, 0.05, 0.6))
    vol_model: LogNormalVolModel = field(default_factory=LogNormalVolModel)
    costs: CostParams = field(default_factory=CostParams)
    kind: str = MEAN_VARIANCE
    periods: int = 600
    reps: int = 1000
    n: int = 5000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.periods < 2:
            raise ValueError(f"periods must be >= 2, got {self.periods}")
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")
        if self.n < 10:
            raise ValueError(f"n must be >= 10, got {self.n}")
        if self.kind not in PORTFOLIO_KINDS:
            raise ValueError(f"kind must be one of {PORTFOLIO_KINDS}, got {self.kind!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def cells(self) -> int:
        return self.reps * self.n * self.periods


@dataclass
class PanelState:
    ic_series: np.ndarray
    vols: np.ndarray
    signals: np.ndarray
    returns: Optional[np.ndarray] = None
    weights: Optional[np.ndarray] = None
    clamped_ic: int = 0


@dataclass(frozen=True)
class RepMetrics:
    ir: float
    ir_adj: float
    tr: float
    clamped_ic: int = 0


@dataclass(frozen=True)
class SimResult:
    ir_mean: float
    ir_adj_mean: float
    tr_mean: float
    ir_se: float
    ir_adj_se: float
    tr_se: float
    reps_used: int
    reps_excluded: int = 0
    ir_adj_above_ir: int = 0
    clamped_ic: int = 0


def rep_stream(seed: int, rep: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, rep])))


def gen_ic_series(stats: SignalStats, periods: int, rng: np.random.Generator) -> np.ndarray:
    if periods < 1:
        raise ValueError("periods must be >= 1")
    return stats.mu_ic + stats.v_ic * rng.standard_normal(periods)


def gen_universe_vols(model: LogNormalVolModel, n: int, rng: np.random.Generator) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.exp(model.log_mean + model.log_sd * rng.standard_normal(n))


def gen_signal_panel(n: int, periods: int, rho: float, rng: np.random.Generator) -> np.ndarray:
    """Unit-variance AR(1) signals, shape (n, periods + 1).

    x_{t+1} = rho * x_t + zeta_t with Var(zeta) = 1 - rho^2, x_0 ~ N(0, 1).
    """
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    z = np.empty((n, periods + 1))
    z[:, 0] = rng.standard_normal(n)
    z[:, 1:] = rng.standard_normal((n, periods))
    z[:, 1:] *= math.sqrt(1.0 - rho * rho)
    if rho == 0.0:
        return z
    return lfilter([1.0], [1.0, -rho], z, axis=1)


def gen_returns(panel: PanelState, rng: np.random.Generator) -> np.ndarray:
    """r_{i,t} = sigma_i * (IC_t * x_{i,t} + eps_{i,t}), Var(eps) = 1 - IC_t^2.

    Periods with |IC_t| > 1 get zero noise variance and are counted in
    ``panel.clamped_ic``.
    """
    ic = panel.ic_series
    x = panel.signals[:, 1:]
    n, periods = x.shape
    noise_var = 1.0 - ic * ic
    bad = noise_var < 0
    if bad.any():
        panel.clamped_ic += int(bad.sum())
        logger.warning("%d IC draws with |IC| > 1; noise variance floored at 0", int(bad.sum()))
        noise_var = np.where(bad, 0.0, noise_var)
    eps = rng.standard_normal((n, periods))
    eps *= np.sqrt(noise_var)
    eps += ic * x
    eps *= panel.vols[:, None]
    panel.returns = eps
    return eps


def quintile_weights(signals: np.ndarray) -> np.ndarray:
    """+5/n on the top floor(n/5) and -5/n on the bottom floor(n/5) per column.

    Securities are ordered by (signal, index) ascending: the first k are
    shorted and the last k are held long, so ties go by security index.
    """
    n, cols = signals.shape
    k = n // 5
    w = np.zeros_like(signals, dtype=float)
    part = np.partition(signals, [k - 1, n - k], axis=0)
    lo_thr, hi_thr = part[k - 1], part[n - k]
    bottom = signals <= lo_thr
    top = signals >= hi_thr
    ok = (bottom.sum(axis=0) == k) & (top.sum(axis=0) == k)
    w[bottom] = -5.0 / n
    w[top] = 5.0 / n
    for j in np.flatnonzero(~ok):
        # ties straddle a cut-off; rank this column exactly
        order = np.argsort(signals[:, j], kind="stable")
        col = np.zeros(n)
        col[order[:k]] = -5.0 / n
        col[order[n - k:]] = 5.0 / n
        w[:, j] = col
    return w


def mv_weight_scale(stats: SignalStats, costs: CostParams, n: int) -> float:
    return costs.te / math.sqrt(stats.v_ic**2 + (1.0 - stats.mu_ic**2 - stats.v_ic**2) / n)


def build_weights(panel: PanelState, config: SimulationConfig) -> np.ndarray:
    """Active weights for every column of the signal panel, t = 0 included."""
    x = panel.signals
    n = x.shape[0]
    if config.kind == MEAN_VARIANCE:
        scale = mv_weight_scale(config.stats, config.costs, n)
        w = x * (scale / n / panel.vols)[:, None]
    else:
        w = quintile_weights(x)
    panel.weights = w
    return w


def portfolio_metrics(
    weights: np.ndarray, returns: np.ndarray, costs: CostParams
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-period gross return, net return and one-way turnover.

    ``weights`` carries the t = 0 column, so it has one more column than
    ``returns``.
    """
    if weights.shape[1] != returns.shape[1] + 1 or weights.shape[0] != returns.shape[0]:
        raise ValueError("weights must be (n, periods + 1) and returns (n, periods)")
    traded = np.abs(np.diff(weights, axis=1)).sum(axis=0)
    gross = np.einsum("ij,ij->j", weights[:, 1:], returns)
    net = gross - costs.tcost * traded
    return gross, net, 0.5 * traded


def _sharpe(x: np.ndarray) -> float:
    sd = float(np.std(x, ddof=1))
    if not sd > 0:
        return math.nan
    return float(np.mean(x)) / sd


def simulate_panel(config: SimulationConfig, rng: np.random.Generator) -> PanelState:
    ic = gen_ic_series(config.stats, config.periods, rng)
    vols = gen_universe_vols(config.vol_model, config.n, rng)
    signals = gen_signal_panel(config.n, config.periods, config.stats.rho, rng)
    panel = PanelState(ic_series=ic, vols=vols, signals=signals)
    gen_returns(panel, rng)
    build_weights(panel, config)
    return panel


def run_rep(config: SimulationConfig, rep: int) -> RepMetrics:
    panel = simulate_panel(config, rep_stream(config.seed, rep))
    gross, net, turnover = portfolio_metrics(panel.weights, panel.returns, config.costs)
    return RepMetrics(
        ir=_sharpe(gross),
        ir_adj=_sharpe(net),
        tr=float(np.mean(turnover)),
        clamped_ic=panel.clamped_ic,
    )


def _run_chunk(config: SimulationConfig, reps: list[int]) -> list[RepMetrics]:
    return [run_rep(config, r) for r in reps]


def _se(x: np.ndarray) -> float:
    if len(x) < 2:
        return math.nan
    return float(np.std(x, ddof=1) / math.sqrt(len(x)))


def aggregate(results: list[RepMetrics]) -> SimResult:
    """Ordered reduction over per-rep metrics; degenerate reps are dropped."""
    good = [r for r in results if math.isfinite(r.ir) and math.isfinite(r.ir_adj)]
    excluded = len(results) - len(good)
    if excluded:
        logger.warning("excluded %d repetitions with zero return variance", excluded)
    if not good:
        raise RuntimeError("every repetition had zero return variance")
    ir = np.array([r.ir for r in good])
    ir_adj = np.array([r.ir_adj for r in good])
    tr = np.array([r.tr for r in good])
    return SimResult(
        ir_mean=float(ir.mean()),
        ir_adj_mean=float(ir_adj.mean()),
        tr_mean=float(tr.mean()),
        ir_se=_se(ir),
        ir_adj_se=_se(ir_adj),
        tr_se=_se(tr),
        reps_used=len(good),
        reps_excluded=excluded,
        ir_adj_above_ir=int(np.sum(ir_adj > ir)),
        clamped_ic=sum(r.clamped_ic for r in results),
    )


def run_experiment(config: SimulationConfig, workers: Optional[int] = None) -> SimResult:
    """Run ``config.reps`` repetitions and aggregate them in rep order.

    ``workers`` defaults to the CPU count; with one worker everything runs
    in-process. The result is identical for any worker count.
    """
    if workers is None:
        workers = os.cpu_count() or 1
    workers = max(1, min(workers, config.reps))
    reps = list(range(config.reps))
    if workers == 1:
        results = _run_chunk(config, reps)
    else:
        chunks = [reps[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk, [config] * workers, chunks))
        by_rep: dict[int, RepMetrics] = {}
        for chunk, part in zip(chunks, parts):
            by_rep.update(zip(chunk, part))
        results = [by_rep[r] for r in reps]
    return aggregate(results)
