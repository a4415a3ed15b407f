"""The active-learning experiment loop."""

from __future__ import annotations

import csv
import io
import logging
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from ..clock import VirtualClock, WallClock
from .measure import Measurement, Sample
from .repeater import Quantity
from .settings import TunerSettings
from .space import Configuration, SearchSpaceDef, SpaceExhausted, random_next, sobol_next
from .stop import evaluate_stop
from .surrogate import Surrogate, fit_and_validate, suggest

log = logging.getLogger(__name__)

Evaluator = Callable[[Configuration, int], Sample]
OBJECTIVE_NOTE = "mean soft score over valid repetitions; configurations without a valid run rank last"


@dataclass
class ExperimentState:
    space: SearchSpaceDef
    settings: TunerSettings
    clock: object
    measured: dict[tuple[int, ...], Measurement] = field(default_factory=dict)
    current_best: tuple[int, ...] | None = None
    best_objective: float | None = None
    surrogate: Surrogate | None = None
    configs_since_improvement: int = 0
    default_indices: tuple[int, ...] | None = None
    default_objective: float | None = None
    sobol_index: int = 1
    evaluations: int = 0
    started_at: float = 0.0

    @property
    def model_validated(self) -> bool:
        return self.surrogate is not None

    def elapsed(self) -> float:
        return self.clock.now() - self.started_at

    def objectives(self) -> dict[tuple[int, ...], float]:
        return {k: m.mean for k, m in self.measured.items()}

    def record(self, key: tuple[int, ...], m: Measurement) -> bool:
        """Store a finished measurement; True if it improved the best."""
        self.measured[key] = m
        value = m.mean
        if self.best_objective is None or value < self.best_objective:
            self.current_best = key
            self.best_objective = value
            self.configs_since_improvement = 0
            return True
        self.configs_since_improvement += 1
        return False


@dataclass
class ExperimentReport:
    space: SearchSpaceDef
    rows: list[dict] = field(default_factory=list)
    best: Configuration | None = None
    best_objective: float | None = None
    stop_reason: str = ""
    evaluations: int = 0
    configurations: int = 0
    wall_time: float = 0.0
    model_validated_at: int | None = None

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        names = list(self.space.names)
        w.writerow(["iteration", *names, "repetitions", "mean_objective", "valid", "elapsed_s", "source"])
        for r in self.rows:
            w.writerow([r["iteration"], *r["values"], r["repetitions"], _fmt(r["mean"]),
                        int(r["valid"]), _fmt(r["elapsed"]), r["source"]])
        w.writerow([])
        w.writerow(["# summary"])
        w.writerow(["best_configuration", str(self.best) if self.best else ""])
        w.writerow(["best_objective", _fmt(self.best_objective)])
        w.writerow(["stop_reason", self.stop_reason])
        w.writerow(["total_evaluations", self.evaluations])
        w.writerow(["configurations", self.configurations])
        w.writerow(["model_validated_at", "" if self.model_validated_at is None else self.model_validated_at])
        w.writerow(["wall_time_s", _fmt(self.wall_time)])
        w.writerow(["objective", OBJECTIVE_NOTE])
        return buf.getvalue()

    def write(self, path) -> None:
        Path(path).write_text(self.to_csv())


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return repr(round(v, 9))
    return str(v)


def measure(config: Configuration, evaluator: Evaluator, settings: TunerSettings, state: ExperimentState,
            ) -> Measurement:
    """Collect repetitions until the repeater is satisfied."""
    m = Measurement(config)
    rep = settings.repeater
    batch = getattr(evaluator, "evaluate_many", None)
    if batch is not None and isinstance(rep, Quantity):
        samples = batch([(config, k) for k in range(rep.k)])
        for s in samples:
            _account(state, settings, s)
            m.repetitions.append(s)
        return m
    while True:
        k = m.count
        try:
            s = evaluator(config, k)
        except Exception as exc:  # a failing evaluation must not end the experiment
            log.warning("evaluation of %s (repetition %d) failed: %s", config, k, exc)
            s = Sample.failure()
        _account(state, settings, s)
        m.repetitions.append(s)
        if rep.decide(m, state):
            return m


def _account(state, settings, sample):
    state.evaluations += 1
    if isinstance(state.clock, VirtualClock):
        state.clock.advance(settings.perEvalTimeLimit)


def run_experiment(settings: TunerSettings, space: SearchSpaceDef, evaluator: Evaluator, clock=None,
                   ) -> tuple[Configuration | None, ExperimentReport]:
    """Tune ``space`` with ``evaluator``; returns the best configuration and the report.

    Configurations come from the selection algorithm until the surrogate
    validates, then from the model. Every configuration is measured at most
    once. With a virtual clock each evaluation costs ``perEvalTimeLimit``.
    """
    if clock is None:
        clock = VirtualClock() if settings.virtual_clock else WallClock()
    clock.start()
    rng = random.Random(settings.seed)
    state = ExperimentState(space, settings, clock)
    state.started_at = clock.now()
    report = ExperimentReport(space)
    stop_reason = None

    queue: list[tuple[Configuration, str]] = []
    if settings.default_configuration is not None:
        default = Configuration.of({n: settings.default_configuration[n] for n in space.names})
        state.default_indices = space.indices(default)
        queue.append((default, "default"))

    while stop_reason is None:
        if queue:
            config, source = queue.pop(0)
        else:
            try:
                config, source = _select(state, settings, rng)
            except SpaceExhausted:
                stop_reason = "space exhausted"
                break
        key = space.indices(config)
        if key in state.measured:
            raise RuntimeError(f"configuration {config} selected twice")
        m = measure(config, evaluator, settings, state)
        state.record(key, m)
        if key == state.default_indices:
            state.default_objective = m.mean
        report.rows.append(dict(iteration=len(state.measured), values=config.values(), repetitions=m.count,
                                mean=m.mean, valid=m.valid, elapsed=state.elapsed(), source=source))
        was_validated = state.model_validated
        state.surrogate = fit_and_validate(state.objectives(), space)
        if state.model_validated and not was_validated and report.model_validated_at is None:
            report.model_validated_at = len(state.measured)
        stop_reason = evaluate_stop(settings.stop, state)
        if stop_reason is None and len(state.measured) >= space.size:
            stop_reason = "space exhausted"

    report.best = space.config(state.current_best) if state.current_best is not None else None
    report.best_objective = state.best_objective
    report.stop_reason = stop_reason
    report.evaluations = state.evaluations
    report.configurations = len(state.measured)
    report.wall_time = state.elapsed()
    return report.best, report


def _select(state: ExperimentState, settings: TunerSettings, rng: random.Random) -> tuple[Configuration, str]:
    space = state.space
    if state.model_validated:
        key = suggest(space, state.objectives(), state.surrogate, settings.model)
        return space.config(key), "model"
    if settings.selection == "sobol":
        config, used = sobol_next(space, state.sobol_index, set(state.measured))
        state.sobol_index = used + 1
        return config, "sobol"
    return random_next(space, rng, set(state.measured)), "random"
