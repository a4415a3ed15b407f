"""Stop conditions and their composition.

Conditions flagged ``mandatory`` must all fire; among the others any single
one suffices. With only mandatory conditions, all of them firing stops the
experiment.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class QuantityStop:
    n: int
    mandatory: bool = False
    name = "quantity"

    def fires(self, state) -> bool:
        return len(state.measured) >= self.n


@dataclass(frozen=True)
class AdaptiveStop:
    fraction: float
    mandatory: bool = False
    name = "adaptive"

    def fires(self, state) -> bool:
        return len(state.measured) >= self.fraction * state.space.size


@dataclass(frozen=True)
class TimeStop:
    seconds: float
    mandatory: bool = False
    name = "time"

    def fires(self, state) -> bool:
        return state.elapsed() >= self.seconds


@dataclass(frozen=True)
class ImprovementStop:
    n: int = 50
    mandatory: bool = False
    name = "improvement"

    def fires(self, state) -> bool:
        return state.configs_since_improvement >= self.n


@dataclass(frozen=True)
class GuaranteedStop:
    """Fires once the best configuration strictly beats the measured default."""

    mandatory: bool = False
    name = "guaranteed"

    def fires(self, state) -> bool:
        if state.default_objective is None or state.best_objective is None:
            return False
        return state.best_objective < state.default_objective


def evaluate_stop(conditions, state) -> str | None:
    """Name(s) of the firing conditions when the experiment should stop, else ``None``."""
    mandatory = [c for c in conditions if c.mandatory]
    optional = [c for c in conditions if not c.mandatory]
    if not all(c.fires(state) for c in mandatory):
        return None
    if optional:
        fired = [c.name for c in optional if c.fires(state)]
        if not fired:
            return None
        return "+".join([c.name for c in mandatory] + fired)
    return "+".join(c.name for c in mandatory) if mandatory else None
