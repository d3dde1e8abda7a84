import pytest

from turnover_ir.analytics import CostParams, SignalStats
from turnover_ir.stat_kernels import LogNormalVolModel, lognormal_universe_stats

TABLE_DECAYS = (0.4, 0.35, 0.3, 0.25, 0.2, 0.15, 0.1, 0.05)


@pytest.fixture
def vol_model():
    return LogNormalVolModel(-0.722, 0.306)


@pytest.fixture
def universe(vol_model):
    return lognormal_universe_stats(vol_model, 5000)


@pytest.fixture
def costs():
    return CostParams(tcost=0.01, te=0.05)


@pytest.fixture
def table_stats():
    return SignalStats(mu_ic=0.05, v_ic=0.05, rho=0.6)


@pytest.fixture
def blend_stats():
    return SignalStats(mu_ic=0.05, v_ic=0.1, rho=0.9)
