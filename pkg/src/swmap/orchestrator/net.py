"""Socket transport: the main node's worker service and the worker client."""

from __future__ import annotations

import asyncio
import logging
import threading
import time
from concurrent.futures import Future

from ..tuner.measure import Sample
from ..tuner.space import Configuration
from .coordinator import DEATH_THRESHOLD, HEARTBEAT_INTERVAL, Coordinator
from .pool import to_sample
from .protocol import (Bye, Cancel, Heartbeat, Hello, ProtocolError, ResultMsg, TaskMsg, decode, derive_seed, encode,
                       task_id)
from .worker import worker_run

log = logging.getLogger(__name__)

SWEEP_INTERVAL = 0.5


class WorkerService:
    """Accepts worker connections and feeds tasks from a :class:`Coordinator`.

    All coordinator access happens on the event loop thread. The service runs
    its loop in a background thread so a synchronous caller (the tuner) can
    wait on the futures returned by :meth:`submit`.
    """

    def __init__(self, host: str = "127.0.0.1", port: int = 0, threshold: float = DEATH_THRESHOLD):
        self.host, self.port = host, port
        self.coordinator = Coordinator(threshold=threshold)
        self._writers: dict[str, asyncio.StreamWriter] = {}
        self._waiting: dict[str, Future] = {}
        self._loop = asyncio.new_event_loop()
        self._ready = threading.Event()
        self._thread = threading.Thread(target=self._serve, daemon=True)
        self._server = None

    def start(self) -> "WorkerService":
        self._thread.start()
        self._ready.wait()
        return self

    def _serve(self) -> None:
        asyncio.set_event_loop(self._loop)
        self._server = self._loop.run_until_complete(asyncio.start_server(self._handle, self.host, self.port))
        self.port = self._server.sockets[0].getsockname()[1]
        self._loop.create_task(self._ticker())
        self._ready.set()
        self._loop.run_forever()

    def stop(self) -> None:
        if self._server is None:
            return
        fut = asyncio.run_coroutine_threadsafe(self._shutdown(), self._loop)
        fut.result(timeout=5)
        self._loop.call_soon_threadsafe(self._loop.stop)
        self._thread.join(timeout=5)
        self._loop.close()
        self._server = None

    async def _shutdown(self) -> None:
        for w in list(self._writers.values()):
            try:
                w.write(encode(Bye("main")).encode())
                w.close()
            except Exception:
                pass
        self._server.close()
        me = asyncio.current_task()
        others = [t for t in asyncio.all_tasks() if t is not me]
        for t in others:
            t.cancel()
        await asyncio.gather(*others, return_exceptions=True)

    @staticmethod
    def now() -> float:
        return time.monotonic()

    async def _ticker(self) -> None:
        while True:
            await asyncio.sleep(SWEEP_INTERVAL)
            self._send_all(self.coordinator.sweep(self.now()))
            self._pump()

    def _send(self, worker_id: str, msg) -> None:
        w = self._writers.get(worker_id)
        if w is not None and not w.is_closing():
            w.write(encode(msg).encode())

    def _send_all(self, pairs) -> None:
        for wid, msg in pairs:
            self._send(wid, msg)
        self._settle()

    def _pump(self) -> None:
        for wid, task in self.coordinator.dispatch(self.now()):
            self._send(wid, task)
        self._settle()

    def _settle(self) -> None:
        for tid in list(self._waiting):
            res = self.coordinator.result(tid)
            if res is not None:
                self._waiting.pop(tid).set_result(res)

    async def _handle(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        wid = None
        try:
            while True:
                line = await reader.readline()
                if not line:
                    break
                try:
                    msg = decode(line)
                except ProtocolError as exc:
                    log.warning("bad message: %s", exc)
                    continue
                now = self.now()
                if isinstance(msg, Hello):
                    wid = msg.workerId
                    self._writers[wid] = writer
                    self.coordinator.register(wid, now)
                elif isinstance(msg, Heartbeat):
                    self.coordinator.heartbeat(msg.workerId, now)
                elif isinstance(msg, ResultMsg):
                    _, cancels = self.coordinator.on_result(msg, now)
                    self._send_all(cancels)
                elif isinstance(msg, Bye):
                    break
                self._pump()
        finally:
            if wid is not None:
                self._writers.pop(wid, None)
                self.coordinator.leave(wid)
                self._pump()
            writer.close()

    def submit(self, task: TaskMsg) -> Future:
        fut: Future = Future()

        def _add():
            self.coordinator.submit(task)
            self._waiting[task.taskId] = fut
            self._pump()
        self._loop.call_soon_threadsafe(_add)
        return fut


class RemoteEvaluator:
    """Tuner evaluator backed by a :class:`WorkerService`."""

    def __init__(self, service: WorkerService, scenario_ref, time_limit: float, experiment_seed: int = 0,
                 virtual_clock: bool = False):
        self.service = service
        self.scenario_ref = scenario_ref
        self.time_limit = time_limit
        self.experiment_seed = experiment_seed
        self.virtual_clock = virtual_clock
        self._serial = 0

    def _task(self, config: Configuration, repetition: int) -> TaskMsg:
        cfg = config.as_dict()
        self._serial += 1
        return TaskMsg(f"{task_id(cfg, repetition)}-{self._serial}", self.scenario_ref, cfg, self.time_limit,
                       repetition, derive_seed(self.experiment_seed, cfg, repetition), self.virtual_clock)

    def __call__(self, config: Configuration, repetition: int) -> Sample:
        return self.evaluate_many([(config, repetition)])[0]

    def evaluate_many(self, items) -> list[Sample]:
        futures = [self.service.submit(self._task(c, r)) for c, r in items]
        return [to_sample(f.result()) for f in futures]


def run_worker(host: str, port: int, worker_id: str, heartbeat: float = HEARTBEAT_INTERVAL,
               max_tasks: int | None = None) -> int:
    """Connect to a main node and solve tasks until told to leave; returns the number of tasks run."""
    return asyncio.run(_worker_main(host, port, worker_id, heartbeat, max_tasks))


async def _worker_main(host, port, worker_id, heartbeat, max_tasks) -> int:
    reader, writer = await asyncio.open_connection(host, port)
    lock = asyncio.Lock()

    async def send(msg):
        async with lock:
            writer.write(encode(msg).encode())
            await writer.drain()

    async def beat():
        while True:
            await asyncio.sleep(heartbeat)
            await send(Heartbeat(worker_id))

    await send(Hello(worker_id))
    beater = asyncio.create_task(beat())
    done = 0
    loop = asyncio.get_running_loop()
    try:
        while max_tasks is None or done < max_tasks:
            line = await reader.readline()
            if not line:
                break
            msg = decode(line)
            if isinstance(msg, Bye):
                break
            if isinstance(msg, Cancel):
                continue  # a solve cannot be interrupted; its late result is discarded upstream
            if isinstance(msg, TaskMsg):
                try:
                    res = await loop.run_in_executor(None, worker_run, msg, worker_id)
                except Exception as exc:
                    log.warning("task %s crashed: %s", msg.taskId, exc)
                    res = ResultMsg.failure(msg.taskId, worker_id)
                await send(res)
                done += 1
        await send(Bye(worker_id))
    except (ConnectionError, asyncio.IncompleteReadError):
        pass
    finally:
        beater.cancel()
        writer.close()
    return done
