"""Distributed evaluation: wire protocol, coordinator, worker runtime and transports."""

from .coordinator import (DEATH_THRESHOLD, GRACE_FRACTION, HEARTBEAT_INTERVAL, Coordinator, WorkerRecord)
from .pool import PoolEvaluator, to_sample
from .protocol import (PROTOCOL_VERSION, Bye, Cancel, Heartbeat, Hello, ProtocolError, ResultMsg, TaskMsg, decode,
                       derive_seed, encode)
from .worker import resolve_scenario, worker_run
