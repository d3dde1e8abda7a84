"""Turnover-adjusted information ratios for mean-variance and quintile portfolios."""

from .analytics import (
    CostParams,
    MetricsRow,
    SignalStats,
    crossover_decay,
    expected_return_mv,
    ir_adj_mv,
    ir_adj_quintile,
    ir_mv,
    ir_quintile,
    mv_weight,
    quintile_turnover,
    turnover_mv,
)
from .integrated_signals import (
    EwmaBlend,
    OneLagBlend,
    OptimizationResult,
    ir_adj_mv_ewma,
    ir_adj_one_lag,
    ir_adj_quintile_ewma,
    optimize_blend,
)
from .sim_engine import SimResult, SimulationConfig, run_experiment
from .stat_kernels import LogNormalVolModel, UniverseStats, lognormal_universe_stats

__version__ = "0.1.0"
