"""Acceptance suite: one test per headline criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v``. The desk-scale
simulation takes a few minutes on one core; deselect it with ``-m "not slow"``.
"""

import math
import time

import numpy as np
import pytest

from turnover_ir import analytics as an
from turnover_ir import integrated_signals as isg
from turnover_ir.analytics import CostParams, SignalStats
from turnover_ir.sim_engine import SimulationConfig, run_experiment
from turnover_ir.stat_kernels import (
    LogNormalVolModel,
    bvn_rect_prob,
    lognormal_universe_stats,
    truncated_tail_moments,
)

from test_analytics import MV_TABLE, QUINTILE_TABLE
from test_stat_kernels import brute_force_rect

INF = math.inf
VOLS = LogNormalVolModel(-0.722, 0.306)
COSTS = CostParams(0.01, 0.05)
DECAYS = tuple(d for d, *_ in MV_TABLE)


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        assert ok, detail

    return emit


def _table_errors(kind, table):
    universe = lognormal_universe_stats(VOLS, 5000)
    worst = 0.0
    for decay, ir, ir_adj, tr in table:
        row = an.theory_row(kind, SignalStats(0.05, 0.05, 1.0 - decay), universe, COSTS)
        worst = max(worst, abs(row.ir - ir), abs(row.ir_adj - ir_adj), abs(row.tr - tr))
    return worst


def test_mean_variance_theory_table(report):
    start = time.perf_counter()
    worst = _table_errors("mv", MV_TABLE)
    elapsed = time.perf_counter() - start
    report("mean-variance theory table", worst <= 1e-3 and elapsed < 1.0,
           f"max |error| {worst:.5f} (tol 0.001), {elapsed:.3f}s (limit 1s)")


def test_quintile_theory_table(report):
    start = time.perf_counter()
    worst = _table_errors("quintile", QUINTILE_TABLE)
    elapsed = time.perf_counter() - start
    report("quintile theory table", worst <= 2e-3 and elapsed < 5.0,
           f"max |error| {worst:.5f} (tol 0.002), {elapsed:.3f}s (limit 5s)")


@pytest.mark.slow
def test_desk_scale_simulation(report):
    universe = lognormal_universe_stats(VOLS, 5000)
    start = time.perf_counter()
    worst = {"ir": 0.0, "ir_adj": 0.0, "tr": 0.0}
    lines = []
    for kind in an.PORTFOLIO_KINDS:
        for decay in sorted(DECAYS):
            stats = SignalStats(0.05, 0.05, 1.0 - decay)
            theory = an.theory_row(kind, stats, universe, COSTS)
            res = run_experiment(SimulationConfig(
                stats=stats, vol_model=VOLS, costs=COSTS, kind=kind,
                periods=600, reps=50, n=5000, seed=20240601,
            ))
            errs = {
                "ir": abs(res.ir_mean - theory.ir),
                "ir_adj": abs(res.ir_adj_mean - theory.ir_adj),
                "tr": abs(res.tr_mean - theory.tr),
            }
            for key, val in errs.items():
                worst[key] = max(worst[key], val)
            lines.append(f"{kind} {decay:.2f}: " + " ".join(f"{k}={v:.4f}" for k, v in errs.items()))
    elapsed = time.perf_counter() - start
    ok = worst["ir"] <= 0.02 and worst["ir_adj"] <= 0.02 and worst["tr"] <= 0.01
    detail = (f"max |IR err| {worst['ir']:.4f}, |IR' err| {worst['ir_adj']:.4f} (tol 0.02), "
              f"|TR err| {worst['tr']:.4f} (tol 0.01), {elapsed:.0f}s")
    if not ok:
        detail += "\n  " + "\n  ".join(lines)
    report("desk-scale simulation, 50 reps x 16 configs", ok, detail)


def test_crossover(report):
    universe = lognormal_universe_stats(VOLS, 5000)
    base = SignalStats(0.05, 0.05, 1.0)
    root = an.crossover_decay(base, universe, COSTS)
    ok = root is not None and abs(root - 0.09) <= 0.02
    bad = 0
    if ok:
        for d in np.arange(0.001, 1.0005, 0.001):
            if abs(d - root) < 1e-6:
                continue
            s = base.with_decay(float(d))
            diff = an.ir_adj_mv(s, universe, COSTS) - an.ir_adj_quintile(s, universe, COSTS)
            bad += (d < root and diff <= 0) or (d > root and diff >= 0)
        ok = bad == 0
    report("crossover of adjusted IR curves", ok,
           f"root {root} (target 0.09 +- 0.02), ordering violations {bad} on a 0.001 grid")


def test_bivariate_normal_kernel(report):
    rhos = np.round(np.arange(-0.95, 0.951, 0.1), 2)
    rects = [
        (-INF, 0.0, -INF, 0.0),
        (-INF, -0.8416, 0.8416, INF),
        (-0.8416, 0.8416, 0.8416, INF),
        (-1.0, 0.5, -0.2, 2.0),
        (0.3, INF, -INF, -0.4),
        (-2.5, -1.0, -2.0, 1.5),
        (1.2, 2.7, 1.0, INF),
        (-INF, INF, -0.7, 0.7),
        (0.0, 0.1, -0.05, 0.05),
        (-3.0, 3.0, 2.2, 3.5),
    ]
    worst = 0.0
    for rho in rhos:
        for r in rects:
            worst = max(worst, abs(bvn_rect_prob(*r, float(rho)) - brute_force_rect(*r, float(rho))))
    cases = len(rhos) * len(rects)

    rng = np.random.default_rng(7)
    worst_sum = 0.0
    for a, b, rho in zip(rng.uniform(-4, 4, 500), rng.uniform(-4, 4, 500), rng.uniform(-0.999, 0.999, 500)):
        total = (
            bvn_rect_prob(-INF, a, -INF, b, rho) + bvn_rect_prob(a, INF, -INF, b, rho)
            + bvn_rect_prob(-INF, a, b, INF, rho) + bvn_rect_prob(a, INF, b, INF, rho)
        )
        worst_sum = max(worst_sum, abs(total - 1.0))
    report("bivariate normal kernel", cases == 200 and worst <= 1e-6 and worst_sum <= 1e-7,
           f"{cases} cases, max |error| vs quadrature {worst:.2e} (tol 1e-6), "
           f"quadrant-sum error {worst_sum:.2e} (tol 1e-7)")


def test_truncated_normal_constants(report):
    mean, var = truncated_tail_moments(0.8)
    ok = abs(mean - 1.3998) <= 5e-4 and abs(var - 0.2187) <= 5e-4
    ok = ok and round(mean, 1) == 1.4 and round(var, 2) == 0.22
    report("truncated-normal tail constants", ok, f"tail mean {mean:.6f}, tail variance {var:.6f}")


def test_ewma_derivative_and_optima(report):
    universe = lognormal_universe_stats(VOLS, 5000)
    stats = SignalStats(0.05, 0.1, 0.9)

    def numerator(lam, tcost=0.01):
        return isg.ewma_derivative_numerator(isg.EwmaBlend(lam), stats, universe, CostParams(tcost, 0.05))

    lo, hi = numerator(0.001), numerator(0.999)
    signs = np.sign([numerator(lam) for lam in np.arange(1, 10000) * 1e-4])
    flips = int(np.count_nonzero(signs[1:] != signs[:-1]))

    lam1 = isg.optimize_ewma(stats, universe, CostParams(0.01, 0.05))
    lam3 = isg.optimize_ewma(stats, universe, CostParams(0.03, 0.05))
    w1 = isg.optimize_one_lag(stats, universe, CostParams(0.01, 0.05))
    w3 = isg.optimize_one_lag(stats, universe, CostParams(0.03, 0.05))
    ok = (
        lo > 0 > hi and flips == 1
        and lam1.interior and lam3.interior and 0 < lam1.argmax < 1 and 0 < lam3.argmax < 1
        and lam3.argmax > lam1.argmax and w3.argmax < w1.argmax
    )
    report("EWMA derivative sign and blend optima", ok,
           f"numerator(0.001)={lo:.3e}, numerator(0.999)={hi:.3e}, sign changes {flips}; "
           f"lambda* {lam1.argmax:.4f} / {lam3.argmax:.4f}, w1* {w1.argmax:.4f} / {w3.argmax:.4f} at 1% / 3%")


def _random_draws(seed, count=100):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        stats = SignalStats(rng.uniform(-0.2, 0.2), rng.uniform(0.0, 0.2), rng.uniform(0.0, 1.0))
        model = LogNormalVolModel(rng.uniform(-2.0, 0.5), rng.uniform(0.05, 0.8))
        universe = lognormal_universe_stats(model, int(rng.integers(10, 100_000)))
        costs = CostParams(rng.uniform(0.0, 0.05), rng.uniform(0.005, 0.2))
        yield stats, universe, costs


def test_reduction_identities(report):
    failures = []
    for stats, u, c in _random_draws(11):
        if abs(isg.ir_adj_mv_ewma(isg.EwmaBlend(0.0), stats, u, c) - an.ir_adj_mv(stats, u, c)) > 1e-12:
            failures.append("ewma lambda=0")
        for kind in an.PORTFOLIO_KINDS:
            plain = an.ir_adj_mv(stats, u, c) if kind == "mv" else an.ir_adj_quintile(stats, u, c)
            if abs(isg.ir_adj_one_lag(isg.OneLagBlend(1.0), stats, u, c, kind) - plain) > 1e-12:
                failures.append(f"one-lag w1=1 ({kind})")
        free = CostParams(0.0, c.te)
        if an.ir_adj_mv(stats, u, free) != an.ir_mv(stats, u):
            failures.append("no cost (mv)")
        if an.ir_adj_quintile(stats, u, free) != an.ir_quintile(stats, u):
            failures.append("no cost (quintile)")
        if an.turnover_mv(stats.with_decay(0.0), u, c) != 0.0:
            failures.append("decay 0 mv turnover")
        if an.quintile_turnover(stats.with_decay(0.0).rho) != 0.0:
            failures.append("rho 1 quintile turnover")
        if an.quintile_turnover(stats.with_decay(1.0).rho) != 1.6:
            failures.append("rho 0 quintile turnover")
    report("reduction identities, 100 draws each", not failures,
           "all hold" if not failures else f"{len(failures)} failures: {sorted(set(failures))}")
