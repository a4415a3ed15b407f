"""Discrete-event failure simulation around a real :class:`Coordinator`.

Simulated workers misbehave on purpose: they crash mid-task (and may come
back later), deliver results twice, go silent past the death threshold and
then deliver late, or overrun the task deadline. :class:`SimulatedCluster`
is a tuner evaluator, so whole experiments run through the harness and the
invariants are checked on every tick.
"""

from __future__ import annotations

import json
import random
import zlib
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable

from ..tuner.measure import Sample
from ..tuner.space import Configuration
from .coordinator import BUSY, DEAD, Coordinator
from .pool import to_sample
from .protocol import Cancel, ResultMsg, TaskMsg, derive_seed, task_id

BEHAVIOURS = ("reliable", "crash", "duplicate", "silent", "slow")
TICK = 0.5


@dataclass
class SimWorker:
    wid: str
    behaviour: str
    up: bool = False
    task: TaskMsg | None = None
    finish_at: float = 0.0
    next_beat: float = 0.0
    silent_until: float = 0.0
    restart_at: float | None = None
    outbox: list = field(default_factory=list)  # (deliver_at, message)


class SimulatedCluster:
    """Evaluator whose tasks run on simulated, unreliable workers."""

    def __init__(self, objective: Callable[[dict, int], float], seed: int, n_workers: int = 4,
                 time_limit: float = 5.0, threshold: float = 10.0, horizon: float = 1e5):
        self.rng = random.Random(seed)
        self.objective = objective
        self.seed = seed
        self.time_limit = time_limit
        self.horizon = horizon
        self.c = Coordinator(threshold=threshold)
        self.t = 0.0
        kinds = ["reliable"] + [self.rng.choice(BEHAVIOURS) for _ in range(n_workers - 1)]
        self.workers = [SimWorker(f"w{i}", k) for i, k in enumerate(kinds)]
        self.violations: list[str] = []
        self.executions: Counter = Counter()
        self.submitted: list[str] = []
        self._serial = 0
        for w in self.workers:
            self._boot(w)

    def _boot(self, w: SimWorker) -> None:
        w.up, w.task, w.restart_at, w.outbox = True, None, None, []
        w.next_beat = self.t + 2.0
        self.c.register(w.wid, self.t)

    # evaluator interface

    def __call__(self, config: Configuration, repetition: int) -> Sample:
        return self.evaluate_many([(config, repetition)])[0]

    def evaluate_many(self, items) -> list[Sample]:
        ids = []
        for config, rep in items:
            cfg = config.as_dict()
            self._serial += 1
            msg = TaskMsg(f"{task_id(cfg, rep)}-{self._serial}", "sim", cfg, self.time_limit, rep,
                          derive_seed(self.seed, cfg, rep), True)
            self.c.submit(msg)
            self.submitted.append(msg.taskId)
            ids.append(msg.taskId)
        self.run_until(ids)
        return [to_sample(self.c.result(t)) for t in ids]

    # simulation

    def run_until(self, ids) -> None:
        while any(self.c.result(t) is None for t in ids):
            if self.t > self.horizon:
                self.violations.append(f"tasks lost: {[t for t in ids if self.c.result(t) is None]}")
                for t in ids:  # unblock the experiment; the violation is recorded
                    if self.c.result(t) is None:
                        self.c._accept(ResultMsg.failure(t, "harness"))
                return
            self.step()

    def step(self) -> None:
        rng, c = self.rng, self.c
        self.t += TICK
        now = self.t
        for w in self.workers:
            if not w.up:
                if w.restart_at is not None and now >= w.restart_at:
                    self._boot(w)
                continue
            for item in [o for o in w.outbox if o[0] <= now]:
                w.outbox.remove(item)
                self._deliver(item[1])
            if w.task is not None and now >= w.finish_at:
                self._finish(w)
            if now >= w.next_beat and now >= w.silent_until:
                c.heartbeat(w.wid, now)
                w.next_beat = now + 2.0
        for wid, msg in c.sweep(now):
            self._to_worker(wid, msg)
        for wid, task in c.dispatch(now):
            self._to_worker(wid, task)
        self._check()

    def _to_worker(self, wid: str, msg) -> None:
        w = next(x for x in self.workers if x.wid == wid)
        if not w.up:
            return
        if isinstance(msg, Cancel):
            if w.task is not None and w.task.taskId == msg.taskId and self.rng.random() < 0.5:
                w.task = None  # some cancels land, others race with the result
            return
        self._start(w, msg)

    def _start(self, w: SimWorker, task: TaskMsg) -> None:
        rng = self.rng
        w.task = task
        self.executions[task.taskId] += 1
        duration = rng.uniform(0.5, task.timeLimit)
        if w.behaviour == "slow" and rng.random() < 0.4:
            duration = task.timeLimit * rng.uniform(1.2, 2.0)
        if w.behaviour == "silent" and rng.random() < 0.4:
            w.silent_until = self.t + rng.uniform(11.0, 20.0)
            duration = max(duration, w.silent_until - self.t + 0.5)
        w.finish_at = self.t + duration
        if w.behaviour == "crash" and rng.random() < 0.4:
            w.up = False
            w.restart_at = self.t + rng.uniform(1.0, 30.0) if rng.random() < 0.7 else None
            w.task = None

    def _finish(self, w: SimWorker) -> None:
        task, w.task = w.task, None
        value = self.objective(task.configuration, task.repetitionIndex)
        res = ResultMsg(task.taskId, True, value, 0.0, 0.0, w.wid, self.t)
        self._deliver(res)
        if w.behaviour == "duplicate":
            w.outbox.append((self.t + self.rng.uniform(0.0, 3.0), res))

    def _deliver(self, res: ResultMsg) -> None:
        _, cancels = self.c.on_result(res, self.t)
        for wid, msg in cancels:
            self._to_worker(wid, msg)

    def _check(self) -> None:
        holders = Counter()
        for rec in self.c.workers.values():
            if rec.state == DEAD and rec.task is not None:
                self.violations.append(f"t={self.t}: dead worker {rec.workerId} holds {rec.task}")
            if rec.state == BUSY:
                holders[rec.task] += 1
        for tid, n in holders.items():
            if n > 1:
                self.violations.append(f"t={self.t}: task {tid} held by {n} live workers")

    def audit(self) -> list[str]:
        """Exactly-once acceptance and no lost tasks over everything submitted."""
        out = list(self.violations)
        counts = Counter(self.c.accepted)
        for tid in self.submitted:
            if counts[tid] != 1:
                out.append(f"task {tid} accepted {counts[tid]} times")
            if self.c.result(tid) is None:
                out.append(f"task {tid} never completed")
        extra = set(counts) - set(self.submitted)
        if extra:
            out.append(f"results for unknown tasks {sorted(extra)}")
        return out


def synthetic_objective(config: dict, repetition: int) -> float:
    """Cheap deterministic stand-in for a solver run."""
    key = json.dumps(sorted(config.items()))
    return float(zlib.crc32(key.encode()) % 1000) + repetition
