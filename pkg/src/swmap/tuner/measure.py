"""Samples, measurements and the scalar objective the tuner minimizes."""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field

from .space import Configuration

WORST = math.inf


@dataclass(frozen=True)
class Sample:
    valid: bool
    soft: float
    first_valid_at: float | None = None
    failed: bool = False
    seconds: float = 0.0

    @property
    def value(self) -> float:
        return self.soft if self.valid and not self.failed else WORST

    @classmethod
    def failure(cls, seconds: float = 0.0) -> "Sample":
        return cls(False, WORST, None, True, seconds)


def objective(samples) -> float:
    """Mean soft score over valid samples; :data:`WORST` when none is valid."""
    if not samples:
        raise ValueError("objective needs at least one sample")
    vals = [s.soft for s in samples if s.valid and not s.failed]
    if not vals:
        return WORST
    return math.fsum(vals) / len(vals)


@dataclass
class Measurement:
    configuration: Configuration
    repetitions: list[Sample] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.repetitions)

    @property
    def mean(self) -> float:
        return objective(self.repetitions)

    @property
    def std(self) -> float:
        vals = [s.soft for s in self.repetitions if s.valid and not s.failed]
        return statistics.stdev(vals) if len(vals) > 1 else 0.0

    @property
    def valid(self) -> bool:
        return math.isfinite(self.mean)
