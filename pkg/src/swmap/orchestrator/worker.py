"""Worker runtime: one solve per task."""

from __future__ import annotations

import time
from functools import lru_cache
from pathlib import Path

from ..clock import make_clock
from ..model import Scenario, load_scenario, scenario_from_dict
from ..solver import SAParams, solve
from ..solver.anneal import PARAMETER_DOMAINS
from .protocol import ResultMsg, TaskMsg


@lru_cache(maxsize=16)
def _load(path: str) -> Scenario:
    return load_scenario(Path(path))


def resolve_scenario(ref) -> Scenario:
    """A scenario reference is a file path, an inline document or a :class:`Scenario`."""
    if isinstance(ref, Scenario):
        return ref
    if isinstance(ref, dict):
        return scenario_from_dict(ref)
    return _load(str(ref))


def params_for(task: TaskMsg) -> SAParams:
    unknown = set(task.configuration) - set(PARAMETER_DOMAINS)
    if unknown:
        raise ValueError(f"unknown solver parameters {sorted(unknown)}")
    return SAParams(**task.configuration, timeLimit=task.timeLimit, seed=task.seed)


def worker_run(task: TaskMsg, worker_id: str = "local", scenario: Scenario | None = None) -> ResultMsg:
    """Run the solver for ``task`` and report the best score found."""
    t0 = time.perf_counter()
    scen = scenario if scenario is not None else resolve_scenario(task.scenarioRef)
    _, trace = solve(scen, params_for(task), make_clock(task.virtualClock))
    best = trace.best
    valid = best is not None and best.hard == 0
    return ResultMsg(task.taskId, valid, best.soft if valid else None, trace.firstValidAt,
                     trace.lastImprovementAt, worker_id, time.perf_counter() - t0)
