"""Tuning experiment plus the default-versus-tuned comparison at the production time limit."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, replace

from ..clock import make_clock
from ..model import Scenario
from ..orchestrator import PoolEvaluator
from ..solver import DEFAULT_PARAMS, SAParams, solve
from ..tuner import ExperimentReport, TunerSettings, run_experiment, solver_space
from .common import to_csv

COMPARE_HEADER = ("seed", "default_valid", "default_soft", "tuned_valid", "tuned_soft")


@dataclass
class TuneResult:
    report: ExperimentReport
    tuned: SAParams
    comparison: list[dict]

    @property
    def default_median(self) -> float:
        return statistics.median(r["default_soft"] for r in self.comparison)

    @property
    def tuned_median(self) -> float:
        return statistics.median(r["tuned_soft"] for r in self.comparison)

    def comparison_csv(self) -> str:
        rows = list(self.comparison)
        rows.append(dict(seed="median", default_valid=all(r["default_valid"] for r in self.comparison),
                         default_soft=self.default_median, tuned_valid=all(r["tuned_valid"] for r in self.comparison),
                         tuned_soft=self.tuned_median))
        return to_csv(COMPARE_HEADER, rows)


def _final_soft(scenario, params, virtual_clock) -> tuple[bool, float]:
    _, trace = solve(scenario, params, make_clock(virtual_clock))
    best = trace.best
    if best is None or best.hard != 0:
        return False, math.inf
    return True, float(best.soft)


def compare(scenario: Scenario, default: SAParams, tuned: SAParams, time_limit: float, seeds=range(5),
            virtual_clock: bool = True) -> list[dict]:
    rows = []
    for s in seeds:
        dv, ds = _final_soft(scenario, default.with_(timeLimit=time_limit, seed=s), virtual_clock)
        tv, ts = _final_soft(scenario, tuned.with_(timeLimit=time_limit, seed=s), virtual_clock)
        rows.append(dict(seed=s, default_valid=dv, default_soft=ds, tuned_valid=tv, tuned_soft=ts))
    return rows


def bench_tune(settings: TunerSettings, scenario: Scenario, *, production_time: float | None = None,
               compare_seeds=range(5), processes: int = 0) -> TuneResult:
    """Tune the solver on ``scenario`` and compare default and tuned parameters.

    The default configuration is measured first unless the settings name
    another one. ``production_time`` overrides the settings' production limit
    for the comparison runs.
    """
    if settings.default_configuration is None:
        settings = replace(settings, default_configuration=DEFAULT_PARAMS.tunables())
    evaluator = PoolEvaluator(scenario, settings.perEvalTimeLimit, settings.seed,
                              virtual_clock=settings.virtual_clock, processes=processes)
    best, report = run_experiment(settings, solver_space(), evaluator)
    tuned = DEFAULT_PARAMS.with_(**best.as_dict()) if best is not None else DEFAULT_PARAMS
    limit = production_time if production_time is not None else settings.productionTimeLimit
    rows = compare(scenario, DEFAULT_PARAMS, tuned, limit, compare_seeds, settings.virtual_clock)
    return TuneResult(report, tuned, rows)
