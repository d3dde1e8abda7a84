"""Command-line front end.

    turnover-ir theory    --kind mv --decay-grid 0.05:0.4:0.05
    turnover-ir simulate  --kind quintile --decay 0.2 --reps 50 --seed 42
    turnover-ir sweep     --reps 50 --format json --out sweep.json
    turnover-ir optimize  --blend ewma --kind mv --tcost-grid 0.01,0.03
    turnover-ir crossover --out fig3.csv

Exit status: 0 on success, 2 on usage/config errors, 3 when a simulation
exceeds the --max-cells budget. A JSON config file (--config) may supply
any option by its long name with dashes replaced by underscores; explicit
flags win over file values.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from dataclasses import asdict, dataclass
from typing import Any, Optional, Sequence

import numpy as np

from . import analytics as an
from . import integrated_signals as isg
from .report import ReportTable
from .sim_engine import SimulationConfig, run_experiment
from .stat_kernels import LogNormalVolModel, lognormal_universe_stats

logger = logging.getLogger("turnover_ir")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RESOURCE = 3

COMMANDS = ("theory", "simulate", "sweep", "optimize", "crossover")
TABLE_DECAYS = (0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4)

THEORY_COLUMNS = ("autocorrelation", "decay", "ir", "ir_adj", "tr")
SIM_COLUMNS = THEORY_COLUMNS + (
    "ir_sim", "ir_adj_sim", "tr_sim", "ir_se", "ir_adj_se", "tr_se", "reps", "seed",
)
SWEEP_COLUMNS = ("kind",) + SIM_COLUMNS
OPTIMIZE_COLUMNS = ("row_type", "kind", "blend", "tcost", "param", "ir_adj", "interior")
CROSSOVER_COLUMNS = (
    "row_type", "decay", "autocorrelation", "ir_adj_mv", "ir_adj_quintile", "tr_mv", "tr_quintile",
)


class UsageError(Exception):
    pass


class ResourceRefusal(Exception):
    pass


@dataclass(frozen=True)
class ExperimentSpec:
    command: str
    kind: str = an.MEAN_VARIANCE
    blend: str = "ewma"
    decays: tuple[float, ...] = TABLE_DECAYS
    mu_ic: float = 0.05
    v_ic: float = 0.05
    n: int = 5000
    te: float = 0.05
    tcosts: tuple[float, ...] = (0.01,)
    vol_log_mean: float = -0.722
    vol_log_sd: float = 0.306
    periods: int = 600
    reps: int = 1000
    seed: int = 0
    workers: Optional[int] = None
    max_cells: float = 5e10
    exact_constants: bool = False
    curve_points: int = 101
    fmt: str = "csv"
    out: Optional[str] = None
    reproducible: bool = False

    @property
    def tcost(self) -> float:
        return self.tcosts[0]

    def universe(self) -> an.UniverseStats:
        return lognormal_universe_stats(LogNormalVolModel(self.vol_log_mean, self.vol_log_sd), self.n)

    def signal(self, decay: float) -> an.SignalStats:
        return an.SignalStats(self.mu_ic, self.v_ic, 1.0 - decay)

    def costs(self, tcost: Optional[float] = None) -> an.CostParams:
        return an.CostParams(self.tcost if tcost is None else tcost, self.te)

    def parameters(self) -> dict[str, Any]:
        d = asdict(self)
        for key in ("command", "fmt", "out", "workers", "reproducible"):
            d.pop(key)
        d["decays"] = list(self.decays)
        d["tcosts"] = list(self.tcosts)
        return d


def parse_grid(text: Any) -> tuple[float, ...]:
    """'a,b,c' or 'start:stop:step' (stop inclusive) or a JSON list."""
    if isinstance(text, (int, float)):
        return (float(text),)
    if isinstance(text, (list, tuple)):
        return tuple(float(v) for v in text)
    text = str(text).strip()
    try:
        if ":" in text:
            start, stop, step = (float(p) for p in text.split(":"))
            if step <= 0:
                raise UsageError(f"grid step must be > 0 in {text!r}")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return tuple(round(start + i * step, 12) for i in range(count))
        return tuple(float(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise UsageError(f"cannot parse grid {text!r}: {exc}") from exc


def _validate_grid(grid: Sequence[float], name: str, lo: float, hi: float) -> None:
    if not grid:
        raise UsageError(f"{name} grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise UsageError(f"{name} grid must be strictly increasing")
    if grid[0] < lo or grid[-1] > hi:
        raise UsageError(f"{name} grid must lie within [{lo}, {hi}]")


def _check_budget(spec: ExperimentSpec, configs: int) -> None:
    cells = configs * spec.reps * spec.n * spec.periods
    if cells > spec.max_cells:
        raise ResourceRefusal(
            f"refusing to simulate {cells:.3g} cells (reps x n x periods x configs); "
            f"limit is --max-cells {spec.max_cells:.3g}"
        )


def _sim_config(spec: ExperimentSpec, kind: str, decay: float) -> SimulationConfig:
    return SimulationConfig(
        stats=spec.signal(decay),
        vol_model=LogNormalVolModel(spec.vol_log_mean, spec.vol_log_sd),
        costs=spec.costs(),
        kind=kind,
        periods=spec.periods,
        reps=spec.reps,
        n=spec.n,
        seed=spec.seed,
    )


def _theory_cells(spec: ExperimentSpec, kind: str, decay: float) -> dict[str, float]:
    row = an.theory_row(kind, spec.signal(decay), spec.universe(), spec.costs(), spec.exact_constants)
    return {"autocorrelation": row.rho, "decay": row.decay, "ir": row.ir, "ir_adj": row.ir_adj, "tr": row.tr}


def cmd_theory(spec: ExperimentSpec) -> ReportTable:
    _validate_grid(spec.decays, "decay", 0.0, 1.0)
    table = ReportTable(THEORY_COLUMNS)
    for d in spec.decays:
        table.add(**_theory_cells(spec, spec.kind, d))
    return table


def _sim_cells(spec: ExperimentSpec, kind: str, decay: float) -> dict[str, Any]:
    res = run_experiment(_sim_config(spec, kind, decay), workers=spec.workers)
    logger.info("%s decay=%g reps=%d: IR %.4f IR' %.4f TR %.4f", kind, decay, res.reps_used,
                res.ir_mean, res.ir_adj_mean, res.tr_mean)
    return {
        "ir_sim": res.ir_mean, "ir_adj_sim": res.ir_adj_mean, "tr_sim": res.tr_mean,
        "ir_se": res.ir_se, "ir_adj_se": res.ir_adj_se, "tr_se": res.tr_se,
        "reps": res.reps_used, "seed": spec.seed,
    }


def cmd_simulate(spec: ExperimentSpec) -> ReportTable:
    _validate_grid(spec.decays, "decay", 0.0, 1.0)
    _check_budget(spec, len(spec.decays))
    table = ReportTable(SIM_COLUMNS)
    for d in spec.decays:
        table.add(**_theory_cells(spec, spec.kind, d), **_sim_cells(spec, spec.kind, d))
    return table


def cmd_sweep(spec: ExperimentSpec) -> ReportTable:
    """Theory and simulation for both portfolio kinds over the decay grid."""
    _validate_grid(spec.decays, "decay", 0.0, 1.0)
    _check_budget(spec, 2 * len(spec.decays))
    table = ReportTable(SWEEP_COLUMNS)
    for kind in an.PORTFOLIO_KINDS:
        for d in spec.decays:
            table.add(kind=kind, **_theory_cells(spec, kind, d), **_sim_cells(spec, kind, d))
    return table


def cmd_optimize(spec: ExperimentSpec) -> ReportTable:
    if spec.blend not in ("one-lag", "ewma"):
        raise UsageError(f"--blend must be one-lag or ewma, got {spec.blend!r}")
    if len(spec.decays) != 1:
        raise UsageError("optimize takes a single --decay")
    _validate_grid(sorted(spec.tcosts), "tcost", 0.0, math.inf)
    if spec.curve_points < 2:
        raise UsageError("--curve-points must be >= 2")
    stats = spec.signal(spec.decays[0])
    universe = spec.universe()
    table = ReportTable(OPTIMIZE_COLUMNS)
    if spec.blend == "one-lag":
        hi = 1.0
    else:
        hi = 0.999
    grid = np.linspace(0.0, hi, spec.curve_points)
    for tcost in spec.tcosts:
        costs = spec.costs(tcost)
        if spec.blend == "one-lag":
            def f(p: float) -> float:
                return isg.ir_adj_one_lag(isg.OneLagBlend(p), stats, universe, costs, spec.kind)
        else:
            def f(p: float) -> float:
                return isg.ir_adj_ewma(isg.EwmaBlend(p), stats, universe, costs, spec.kind)
        for p in grid:
            table.add(row_type="curve", kind=spec.kind, blend=spec.blend, tcost=tcost,
                      param=float(p), ir_adj=f(float(p)), interior=None)
        best = isg.optimize_blend(f, 0.0, hi)
        table.add(row_type="optimum", kind=spec.kind, blend=spec.blend, tcost=tcost,
                  param=best.argmax, ir_adj=best.max_value, interior=best.interior)
    return table


def cmd_crossover(spec: ExperimentSpec) -> ReportTable:
    _validate_grid(spec.decays, "decay", 0.0, 1.0)
    universe = spec.universe()
    costs = spec.costs()

    def cells(d: float) -> dict[str, float]:
        s = spec.signal(d)
        return {
            "decay": d,
            "autocorrelation": 1.0 - d,
            "ir_adj_mv": an.ir_adj_mv(s, universe, costs),
            "ir_adj_quintile": an.ir_adj_quintile(s, universe, costs, spec.exact_constants),
            "tr_mv": an.turnover_mv(s, universe, costs),
            "tr_quintile": an.quintile_turnover(s.rho),
        }

    table = ReportTable(CROSSOVER_COLUMNS)
    for d in spec.decays:
        table.add(row_type="curve", **cells(d))
    root = an.crossover_decay(spec.signal(0.0), universe, costs)
    if root is not None:
        table.add(row_type="crossover", **cells(root))
    table.metadata["crossover_decay"] = root
    return table


HANDLERS = {
    "theory": cmd_theory,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "optimize": cmd_optimize,
    "crossover": cmd_crossover,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option values")
    common.add_argument("--mu-ic", type=float)
    common.add_argument("--v-ic", type=float)
    common.add_argument("--decay", type=float, help="single decay value")
    common.add_argument("--decay-grid", help="'a,b,c' or 'start:stop:step'")
    common.add_argument("--n", type=int, help="number of securities")
    common.add_argument("--te", type=float, help="target tracking error per period")
    common.add_argument("--tcost", type=float, help="one-way proportional cost")
    common.add_argument("--tcost-grid", help="several costs for optimize")
    common.add_argument("--vol-log-mean", type=float)
    common.add_argument("--vol-log-sd", type=float)
    common.add_argument("--periods", type=int)
    common.add_argument("--reps", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--max-cells", type=float)
    common.add_argument("--kind", choices=["mv", "quintile"])
    common.add_argument("--blend", choices=["one-lag", "ewma"])
    common.add_argument("--exact-constants", action="store_true", default=None,
                        help="unrounded quintile constants")
    common.add_argument("--curve-points", type=int)
    common.add_argument("--format", dest="fmt", choices=["csv", "json"])
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--reproducible", action="store_true", default=None,
                        help="omit wall-clock runtime from JSON metadata")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="turnover-ir", description="Turnover-adjusted information ratio toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


_FIELD_NAMES = {
    "mu_ic", "v_ic", "n", "te", "vol_log_mean", "vol_log_sd", "periods", "reps", "seed",
    "workers", "max_cells", "kind", "blend", "exact_constants", "curve_points", "fmt", "out",
    "reproducible",
}


def spec_from_args(args: argparse.Namespace) -> ExperimentSpec:
    values: dict[str, Any] = {}
    if args.command == "optimize":
        values.update(v_ic=0.1, decays=(0.1,))
    elif args.command == "crossover":
        values.update(decays=parse_grid("0.01:1:0.01"))

    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                file_values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(file_values, dict):
            raise UsageError("config file must hold a JSON object")
        _merge(values, {k.replace("-", "_"): v for k, v in file_values.items()})

    _merge(values, {k: v for k, v in vars(args).items() if v is not None})
    try:
        return ExperimentSpec(command=args.command, **values)
    except TypeError as exc:
        raise UsageError(str(exc)) from exc


def _merge(values: dict[str, Any], new: dict[str, Any]) -> None:
    for key, val in new.items():
        if key in ("decay",):
            values["decays"] = (float(val),)
        elif key == "decay_grid":
            values["decays"] = parse_grid(val)
        elif key == "tcost":
            values["tcosts"] = (float(val),)
        elif key == "tcost_grid":
            values["tcosts"] = parse_grid(val)
        elif key == "format":
            values["fmt"] = val
        elif key in _FIELD_NAMES:
            values[key] = val
        elif key in ("command", "config", "verbose"):
            continue
        else:
            raise UsageError(f"unknown option {key!r}")


def run(spec: ExperimentSpec) -> ReportTable:
    start = time.perf_counter()
    table = HANDLERS[spec.command](spec)
    meta = {"command": spec.command, "parameters": spec.parameters(), "seed": spec.seed}
    meta.update(table.metadata)
    meta["runtime_seconds"] = None if spec.reproducible else round(time.perf_counter() - start, 3)
    table.metadata = meta
    return table


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        spec = spec_from_args(args)
        table = run(spec)
        table.write(spec.fmt, spec.out)
    except ResourceRefusal as exc:
        print(f"turnover-ir: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (UsageError, ValueError) as exc:
        print(f"turnover-ir: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
