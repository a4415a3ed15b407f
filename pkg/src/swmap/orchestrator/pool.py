"""In-process worker pool used as the tuner's evaluator."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor

from ..model import Scenario, scenario_to_dict
from ..tuner.measure import Sample
from ..tuner.space import Configuration
from .coordinator import Coordinator
from .protocol import ResultMsg, TaskMsg, derive_seed, task_id
from .worker import resolve_scenario, worker_run


def to_sample(result: ResultMsg) -> Sample:
    if result.failed:
        return Sample.failure(result.wallSeconds)
    soft = result.softScore if result.valid else float("inf")
    return Sample(result.valid, soft, result.firstValidAt, False, result.wallSeconds)


def _run_remote(task: TaskMsg, worker_id: str) -> ResultMsg:
    return worker_run(task, worker_id)


class PoolEvaluator:
    """Evaluate configurations by dispatching solver tasks to local workers.

    With ``processes=0`` tasks run inline, one at a time, which is fully
    deterministic under the virtual clock. With ``processes > 0`` a batch is
    spread over a process pool; results are accepted through the same
    coordinator either way.
    """

    def __init__(self, scenario, time_limit: float, experiment_seed: int = 0, *, virtual_clock: bool = True,
                 workers: int = 1, processes: int = 0):
        self.scenario: Scenario = resolve_scenario(scenario)
        self._ref = scenario if isinstance(scenario, str) else scenario_to_dict(self.scenario)
        self.time_limit = time_limit
        self.experiment_seed = experiment_seed
        self.virtual_clock = virtual_clock
        self.coordinator = Coordinator()
        self.worker_ids = [f"local-{i}" for i in range(max(1, workers, processes))]
        self.processes = processes
        self._serial = 0
        for w in self.worker_ids:
            self.coordinator.register(w, 0.0)

    def task_for(self, config: Configuration, repetition: int) -> TaskMsg:
        cfg = config.as_dict() if isinstance(config, Configuration) else dict(config)
        self._serial += 1
        return TaskMsg(f"{task_id(cfg, repetition)}-{self._serial}", self._ref, cfg, self.time_limit, repetition,
                       derive_seed(self.experiment_seed, cfg, repetition), self.virtual_clock)

    def __call__(self, config: Configuration, repetition: int) -> Sample:
        return self.evaluate_many([(config, repetition)])[0]

    def evaluate_many(self, items) -> list[Sample]:
        tasks = [self.task_for(c, r) for c, r in items]
        for t in tasks:
            self.coordinator.submit(t)
        if self.processes > 0:
            self._run_processes()
        else:
            self._run_inline()
        return [to_sample(self.coordinator.result(t.taskId)) for t in tasks]

    def _now(self) -> float:
        return time.monotonic()

    def _run_inline(self) -> None:
        c = self.coordinator
        while not c.done():
            for wid, task in c.dispatch(self._now()):
                try:
                    res = worker_run(task, wid, self.scenario)
                except Exception:
                    res = ResultMsg.failure(task.taskId, wid)
                c.heartbeat(wid, self._now())
                c.on_result(res, self._now())

    def _run_processes(self) -> None:
        c = self.coordinator
        with ProcessPoolExecutor(self.processes) as ex:
            while not c.done():
                running = [(wid, task, ex.submit(_run_remote, task, wid)) for wid, task in c.dispatch(self._now())]
                for wid, task, fut in running:
                    try:
                        res = fut.result()
                    except Exception:
                        res = ResultMsg.failure(task.taskId, wid)
                    c.heartbeat(wid, self._now())
                    c.on_result(res, self._now())
