"""Scenario comparison table: exact oracle versus default and tuned annealing."""

from __future__ import annotations

from ..clock import make_clock
from ..ilp import build_ilp, exact_solve
from ..model import Scenario
from ..solver import DEFAULT_PARAMS, INVALID, SAParams, quality_ratio, solve
from ..solver.score import Score
from .common import INVALID_MARK, NA, to_csv

TABLE_HEADER = ("scenario", "implementations", "hardware", "oracle", "mh_default_valid", "mh_tuned_valid",
                "quality_default", "quality_tuned", "mh_init_s", "ilp_gen_s", "ilp_vars", "first_valid_s",
                "last_improvement_s")
ORACLE_NODES = 200_000


def _quality(best: Score | None, optimum: Score | None):
    if optimum is None:
        return NA
    if best is None or best.hard != 0:
        return INVALID_MARK
    q = quality_ratio(best, optimum)
    return INVALID_MARK if q == INVALID else float(q)


def table_row(name: str, scenario: Scenario, default: SAParams = DEFAULT_PARAMS, tuned: SAParams | None = None,
              virtual_clock: bool = True, node_budget: int = ORACLE_NODES) -> dict:
    exact = exact_solve(scenario, nodeBudget=node_budget)
    optimum = Score(0, exact.objective) if exact.provedOptimal else None
    _, trace = solve(scenario, default, make_clock(virtual_clock))
    row = dict(scenario=name, implementations=len(scenario.implementations), hardware=len(scenario.hardware),
               oracle=exact.status, mh_default_valid=trace.firstValidAt is not None,
               quality_default=_quality(trace.best, optimum), mh_init_s=trace.init_seconds,
               first_valid_s=trace.firstValidAt, last_improvement_s=trace.lastImprovementAt)
    if tuned is not None:
        _, tt = solve(scenario, tuned, make_clock(virtual_clock))
        row.update(mh_tuned_valid=tt.firstValidAt is not None, quality_tuned=_quality(tt.best, optimum))
    else:
        row.update(mh_tuned_valid=NA, quality_tuned=NA)
    model, gen = build_ilp(scenario, make_clock(virtual_clock))
    row.update(ilp_gen_s=gen, ilp_vars=model.n_vars)
    return row


def bench_table(scenarios, default: SAParams = DEFAULT_PARAMS, tuned: SAParams | None = None,
                virtual_clock: bool = True, node_budget: int = ORACLE_NODES) -> str:
    """One CSV row per ``(name, scenario)``; failures show up as marked cells, never as missing rows."""
    rows = [table_row(n, s, default, tuned, virtual_clock, node_budget) for n, s in scenarios]
    return to_csv(TABLE_HEADER, rows)
