"""Quality-over-time trace of one solver run."""

from __future__ import annotations

from ..clock import make_clock
from ..model import Scenario
from ..solver import SAParams, solve
from .common import to_csv

SOLVE_TRACE_HEADER = ("elapsed_s", "hard", "soft", "valid")


def solve_trace_csv(trace) -> str:
    rows = [dict(elapsed_s=t, hard=sc.hard, soft=sc.soft, valid=int(v)) for t, sc, v in trace.events]
    return to_csv(SOLVE_TRACE_HEADER, rows)


def trace_rows(trace, optimum_soft: float | None) -> list[dict]:
    """Normalized validity ``1 - hard/initialHard`` (clipped) and quality ratio per trace event.

    When the initial solution is already valid, validity is 1 throughout.
    Without an optimum the quality column carries the raw soft score.
    """
    if not trace.events:
        return []
    initial_hard = trace.events[0][1].hard
    rows = []
    for t, sc, valid in trace.events:
        nv = 1.0 if initial_hard == 0 else min(1.0, max(0.0, 1.0 - sc.hard / initial_hard))
        row = dict(elapsed_s=t, hard=sc.hard, soft=sc.soft, normalizedValidity=nv)
        if optimum_soft is None:
            row["rawSoft"] = sc.soft
        elif not valid:
            row["qualityRatio"] = 0.0
        else:
            row["qualityRatio"] = 1.0 if sc.soft == 0 else optimum_soft / sc.soft
        rows.append(row)
    return rows


def bench_trace(scenario: Scenario, params: SAParams, virtual_clock: bool = True,
                optimum_soft: float | None = None) -> str:
    _, trace = solve(scenario, params, make_clock(virtual_clock))
    last = "rawSoft" if optimum_soft is None else "qualityRatio"
    return to_csv(("elapsed_s", "hard", "soft", "normalizedValidity", last), trace_rows(trace, optimum_soft))
