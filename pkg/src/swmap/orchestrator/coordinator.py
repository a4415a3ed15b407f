"""Main-node bookkeeping: task queue, worker liveness, result acceptance.

The coordinator is a plain state machine driven by explicit timestamps, so
the same code backs the in-process pool, the socket server and the
simulated-failure harness.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

from .protocol import Cancel, ResultMsg, TaskMsg

log = logging.getLogger(__name__)

HEARTBEAT_INTERVAL = 2.0
DEATH_THRESHOLD = 10.0
GRACE_FRACTION = 0.1
MAX_ATTEMPTS = 3

IDLE, BUSY, DEAD = "idle", "busy", "dead"


@dataclass
class WorkerRecord:
    workerId: str
    lastHeartbeatAt: float
    state: str = IDLE
    task: str | None = None
    deadline: float | None = None


@dataclass
class TaskEntry:
    msg: TaskMsg
    attempts: int = 0
    holder: str | None = None
    result: ResultMsg | None = None


@dataclass
class Coordinator:
    threshold: float = DEATH_THRESHOLD
    grace: float = GRACE_FRACTION
    max_attempts: int = MAX_ATTEMPTS
    workers: dict[str, WorkerRecord] = field(default_factory=dict)
    tasks: dict[str, TaskEntry] = field(default_factory=dict)
    queue: deque = field(default_factory=deque)
    accepted: list[str] = field(default_factory=list)
    discarded: int = 0
    requeued: int = 0
    deaths: int = 0
    overruns: int = 0

    # workers

    def register(self, worker_id: str, now: float) -> None:
        """A hello: the worker starts empty, so anything it held is released."""
        rec = self.workers.get(worker_id)
        if rec is not None and rec.state == BUSY:
            held = rec.task
            rec.task, rec.deadline = None, None
            self._release(held, worker_id)
        self.workers[worker_id] = WorkerRecord(worker_id, now)

    def heartbeat(self, worker_id: str, now: float) -> None:
        rec = self.workers.get(worker_id)
        if rec is None or rec.state == DEAD:
            # a worker declared dead comes back empty-handed
            self.workers[worker_id] = WorkerRecord(worker_id, now)
            return
        rec.lastHeartbeatAt = max(rec.lastHeartbeatAt, now)

    def leave(self, worker_id: str) -> None:
        rec = self.workers.get(worker_id)
        if rec is not None and rec.state != DEAD:
            self._kill(rec)

    def live_workers(self) -> list[WorkerRecord]:
        return [w for w in self.workers.values() if w.state != DEAD]

    def _kill(self, rec: WorkerRecord) -> None:
        held = rec.task
        self.deaths += 1
        rec.state, rec.task, rec.deadline = DEAD, None, None
        if held is not None:
            self._release(held, rec.workerId)

    def _release(self, tid: str, worker_id: str) -> None:
        entry = self.tasks[tid]
        if entry.holder != worker_id or entry.result is not None:
            return
        entry.holder = None
        if entry.attempts >= self.max_attempts:
            log.warning("task %s failed after %d attempts", tid, entry.attempts)
            self._accept(ResultMsg.failure(tid, worker_id))
        else:
            self.requeued += 1
            self.queue.append(tid)

    # tasks

    def submit(self, msg: TaskMsg) -> None:
        if msg.taskId in self.tasks:
            raise ValueError(f"duplicate task id {msg.taskId}")
        self.tasks[msg.taskId] = TaskEntry(msg)
        self.queue.append(msg.taskId)

    def dispatch(self, now: float) -> list[tuple[str, TaskMsg]]:
        """FIFO assignment of queued tasks to idle live workers."""
        out = []
        idle = deque(w for w in self.workers.values() if w.state == IDLE)
        while self.queue and idle:
            tid = self.queue.popleft()
            entry = self.tasks[tid]
            if entry.result is not None:
                continue
            rec = idle.popleft()
            entry.attempts += 1
            entry.holder = rec.workerId
            rec.state, rec.task = BUSY, tid
            rec.deadline = now + entry.msg.timeLimit * (1 + self.grace)
            out.append((rec.workerId, entry.msg))
        return out

    def on_result(self, msg: ResultMsg, now: float) -> tuple[bool, list[tuple[str, Cancel]]]:
        """Accept the first result per task; later ones are discarded.

        Returns whether ``msg`` was accepted and the cancellations to send to
        other workers still holding the task.
        """
        rec = self.workers.get(msg.workerId)
        if rec is not None and rec.state == BUSY and rec.task == msg.taskId:
            rec.state, rec.task, rec.deadline = IDLE, None, None
            rec.lastHeartbeatAt = max(rec.lastHeartbeatAt, now)
        entry = self.tasks.get(msg.taskId)
        if entry is None or entry.result is not None:
            self.discarded += 1
            log.info("discarded result for %s from %s", msg.taskId, msg.workerId)
            return False, []
        return True, self._accept(msg)

    def _accept(self, msg: ResultMsg) -> list[tuple[str, Cancel]]:
        entry = self.tasks[msg.taskId]
        entry.result = msg
        entry.holder = None
        self.accepted.append(msg.taskId)
        cancels = []
        for w in self.workers.values():
            if w.state == BUSY and w.task == msg.taskId:
                w.state, w.task, w.deadline = IDLE, None, None
                cancels.append((w.workerId, Cancel(msg.taskId)))
        return cancels

    def sweep(self, now: float) -> list[tuple[str, Cancel]]:
        """Declare silent workers dead and fail overrunning tasks."""
        cancels = []
        for rec in list(self.workers.values()):
            if rec.state == DEAD:
                continue
            if now - rec.lastHeartbeatAt > self.threshold:
                log.warning("worker %s silent for %.1fs, declared dead", rec.workerId, now - rec.lastHeartbeatAt)
                self._kill(rec)
            elif rec.state == BUSY and rec.deadline is not None and now > rec.deadline:
                log.warning("task %s overran on %s", rec.task, rec.workerId)
                self.overruns += 1
                cancels.extend(self._accept(ResultMsg.failure(rec.task, rec.workerId)))
        return cancels

    # state

    def result(self, tid: str) -> ResultMsg | None:
        return self.tasks[tid].result

    def pending(self) -> list[str]:
        return [t for t, e in self.tasks.items() if e.result is None]

    def done(self) -> bool:
        return all(e.result is not None for e in self.tasks.values())
