"""Wall and virtual clocks.

Solver and tuner loops read elapsed time from a clock and report work to it
with :meth:`tick`. A :class:`VirtualClock` turns ticks into time at a fixed
rate, which makes traces reproducible; a :class:`WallClock` ignores ticks.
"""

from __future__ import annotations

import time

# roughly the solver's measured candidate evaluations per second on small scenarios
DEFAULT_RATE = 10_000.0


class WallClock:
    virtual = False

    def __init__(self):
        self._t0 = time.perf_counter()

    def start(self) -> None:
        self._t0 = time.perf_counter()

    def now(self) -> float:
        return time.perf_counter() - self._t0

    def tick(self, n: float = 1) -> None:
        pass

    def advance(self, seconds: float) -> None:
        pass


class VirtualClock:
    """Time is ``ticks / rate`` seconds; ``advance`` adds seconds directly."""

    virtual = True

    def __init__(self, rate: float = DEFAULT_RATE):
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.rate = rate
        self._ticks = 0.0
        self._extra = 0.0

    def start(self) -> None:
        self._ticks = 0.0
        self._extra = 0.0

    def now(self) -> float:
        return self._ticks / self.rate + self._extra

    def tick(self, n: float = 1) -> None:
        self._ticks += n

    def advance(self, seconds: float) -> None:
        self._extra += seconds


def make_clock(virtual: bool, rate: float = DEFAULT_RATE):
    return VirtualClock(rate) if virtual else WallClock()
