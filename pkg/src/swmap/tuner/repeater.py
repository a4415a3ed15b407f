"""Repetition strategies: how many samples a configuration gets."""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import stats

from .measure import Measurement

CONFIDENCE = 0.95


def half_width(values) -> float:
    """Two-sided Student-t confidence half-width of the mean."""
    n = len(values)
    if n < 2:
        return math.inf
    mean = math.fsum(values) / n
    s = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (n - 1))
    return float(stats.t.ppf(0.5 + CONFIDENCE / 2, n - 1)) * s / math.sqrt(n)


def relative_half_width(values) -> float:
    """Half-width over ``|mean|``; the absolute half-width when the mean is 0."""
    hw = half_width(values)
    mean = math.fsum(values) / len(values)
    return hw if mean == 0 else hw / abs(mean)


@dataclass(frozen=True)
class Quantity:
    k: int = 2

    def decide(self, measurement: Measurement, state=None) -> bool:
        """True once ``k`` repetitions are in."""
        return measurement.count >= self.k


@dataclass(frozen=True)
class Student:
    max_reps: int = 10
    rel_ci: float = 0.05

    def threshold(self, measurement: Measurement, state) -> float:
        return self.rel_ci

    def decide(self, measurement: Measurement, state=None) -> bool:
        n = measurement.count
        if n >= self.max_reps:
            return True
        values = [s.value for s in measurement.repetitions]
        finite = [v for v in values if math.isfinite(v)]
        if not finite:
            return True
        if len(finite) < len(values) or n < 2:
            return False
        return relative_half_width(values) <= self.threshold(measurement, state)


@dataclass(frozen=True)
class ModelAwareStudent(Student):
    """Student repeater that loosens its threshold for configurations the surrogate deems worse than the best."""

    relax: float = 2.0

    def threshold(self, measurement: Measurement, state) -> float:
        if state is None or state.surrogate is None or state.best_objective is None:
            return self.rel_ci
        ix = state.space.indices(measurement.configuration)
        if float(state.surrogate.predict(ix)[0]) > state.best_objective:
            return self.rel_ci * self.relax
        return self.rel_ci
