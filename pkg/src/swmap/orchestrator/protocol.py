"""Wire protocol between main node and workers.

Every message is one line of JSON terminated by ``\\n``. Each line carries the
header fields ``v`` (protocol version) and ``kind``; the remaining keys are
the message fields. Keys are sorted and separators compact, so a decoded
message re-encodes to the identical line. Non-finite scores travel as
``null``.

Grammar::

    line      = json-object "\\n"
    hello     = {"kind": "hello", "v": 1, "workerId": str}
    heartbeat = {"kind": "heartbeat", "v": 1, "workerId": str}
    task      = {"kind": "task", "v": 1, "taskId": str, "scenarioRef": str | object,
                 "configuration": object, "timeLimit": num, "repetitionIndex": int,
                 "seed": int, "virtualClock": bool}
    result    = {"kind": "result", "v": 1, "taskId": str, "valid": bool,
                 "softScore": num | null, "firstValidAt": num | null,
                 "lastImprovementAt": num | null, "workerId": str,
                 "wallSeconds": num, "failed": bool}
    cancel    = {"kind": "cancel", "v": 1, "taskId": str}
    bye       = {"kind": "bye", "v": 1, "workerId": str}
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, fields
from typing import Any

PROTOCOL_VERSION = 1


class ProtocolError(ValueError):
    pass


@dataclass(frozen=True)
class Hello:
    workerId: str
    kind = "hello"


@dataclass(frozen=True)
class Heartbeat:
    workerId: str
    kind = "heartbeat"


@dataclass(frozen=True)
class TaskMsg:
    taskId: str
    scenarioRef: Any
    configuration: dict
    timeLimit: float
    repetitionIndex: int
    seed: int
    virtualClock: bool = False
    kind = "task"


@dataclass(frozen=True)
class ResultMsg:
    taskId: str
    valid: bool
    softScore: float | None
    firstValidAt: float | None
    lastImprovementAt: float | None
    workerId: str
    wallSeconds: float = 0.0
    failed: bool = False
    kind = "result"

    @classmethod
    def failure(cls, task_id: str, worker_id: str = "", wall: float = 0.0) -> "ResultMsg":
        return cls(task_id, False, None, None, None, worker_id, wall, True)

    def payload(self) -> dict:
        """Fields that must agree between replays of the same task."""
        d = asdict(self)
        del d["workerId"], d["wallSeconds"]
        return d


@dataclass(frozen=True)
class Cancel:
    taskId: str
    kind = "cancel"


@dataclass(frozen=True)
class Bye:
    workerId: str
    kind = "bye"


MESSAGE_TYPES = {cls.kind: cls for cls in (Hello, Heartbeat, TaskMsg, ResultMsg, Cancel, Bye)}


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def encode(msg) -> str:
    body = {k: _clean(v) for k, v in asdict(msg).items()}
    body["kind"] = msg.kind
    body["v"] = PROTOCOL_VERSION
    return json.dumps(body, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def decode(line: str | bytes):
    if isinstance(line, bytes):
        line = line.decode("utf-8")
    try:
        body = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"malformed message: {exc}") from None
    if not isinstance(body, dict):
        raise ProtocolError("message must be an object")
    if body.pop("v", None) != PROTOCOL_VERSION:
        raise ProtocolError("unsupported protocol version")
    cls = MESSAGE_TYPES.get(body.pop("kind", None))
    if cls is None:
        raise ProtocolError("unknown message kind")
    names = {f.name for f in fields(cls)}
    if not set(body) <= names:
        raise ProtocolError(f"unexpected fields {sorted(set(body) - names)}")
    try:
        return cls(**body)
    except TypeError as exc:
        raise ProtocolError(str(exc)) from None


def derive_seed(experiment_seed: int, configuration: dict, repetition: int) -> int:
    """Deterministic solver seed for one repetition of one configuration."""
    key = json.dumps([experiment_seed, sorted(configuration.items()), repetition], separators=(",", ":"))
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:4], "big") >> 1


def task_id(configuration: dict, repetition: int) -> str:
    key = json.dumps(sorted(configuration.items()), separators=(",", ":"))
    return f"{hashlib.sha256(key.encode()).hexdigest()[:12]}-r{repetition}"
