"""Simulated annealing over allocations."""

from __future__ import annotations

import math
import random
import time
from dataclasses import asdict, dataclass, field, replace

from ..clock import WallClock
from ..model.types import Scenario
from .moves import MOVE_KINDS, Move, activate_subtree
from .pool import NO, Allocation, SlotPool
from .score import IncrementalScorer, Score, full_score

FACTOR_VALUES = (1, 2, 3, 5, 10, 100, 1000, 10000)
TEMPERATURE_VALUES = (1, 2, 3, 5, 10, 20, 30, 50, 75, 100)
NEIGHBORHOOD_VALUES = (1, 2, 5, 10, 20, 30, 40, 50)

PARAMETER_DOMAINS: dict[str, tuple] = {
    "subComponentUnassignedFactor": FACTOR_VALUES,
    "softwareComponentUnassignedFactor": FACTOR_VALUES,
    "hardScoreStartingTemperature": TEMPERATURE_VALUES,
    "softScoreStartingTemperature": TEMPERATURE_VALUES,
    "neighborhoodSize": NEIGHBORHOOD_VALUES,
}

MIN_TEMPERATURE = 1e-9
KIND_RETRIES = 12
INVALID = "invalid"


@dataclass(frozen=True)
class SAParams:
    subComponentUnassignedFactor: float = 1
    softwareComponentUnassignedFactor: float = 5
    hardScoreStartingTemperature: float = 100
    softScoreStartingTemperature: float = 100
    neighborhoodSize: int = 50
    timeLimit: float = 10.0
    seed: int = 0

    def __post_init__(self):
        if not self.timeLimit > 0:
            raise ValueError("timeLimit must be positive")
        if int(self.neighborhoodSize) < 1:
            raise ValueError("neighborhoodSize must be >= 1")

    def check_domains(self) -> None:
        """Raise ``ValueError`` unless every tunable value is one of its listed options."""
        for name, values in PARAMETER_DOMAINS.items():
            if getattr(self, name) not in values:
                raise ValueError(f"{name}={getattr(self, name)!r} not in {values}")

    def tunables(self) -> dict:
        d = asdict(self)
        return {k: d[k] for k in PARAMETER_DOMAINS}

    def with_(self, **kw) -> "SAParams":
        return replace(self, **kw)


DEFAULT_PARAMS = SAParams()


@dataclass
class SolveTrace:
    events: list[tuple[float, Score, bool]] = field(default_factory=list)
    firstValidAt: float | None = None
    lastImprovementAt: float | None = None
    init_seconds: float = 0.0
    steps: int = 0
    evaluations: int = 0

    def record(self, t: float, score: Score) -> None:
        valid = score.hard == 0
        self.events.append((t, score, valid))
        if valid:
            if self.firstValidAt is None:
                self.firstValidAt = t
            self.lastImprovementAt = t

    @property
    def best(self) -> Score | None:
        return self.events[-1][1] if self.events else None


def _initial_state(pool: SlotPool, rng: random.Random):
    active = [False] * pool.n_slots
    impl = [NO] * pool.n_slots
    hw = [NO] * pool.n_slots
    if pool.n_hw == 0:
        return active, impl, hw
    for root in pool.roots:
        fresh: list = []
        activate_subtree(pool, root, NO, rng, fresh)
        for i, (a, s, h) in fresh:
            active[i], impl[i], hw[i] = a, s, h
    return active, impl, hw


def initial_allocation(scenario: Scenario, seed: int) -> Allocation:
    """Worst-case pool with a random type-compatible implementation and hardware per required slot."""
    pool = SlotPool(scenario)
    return pool.to_allocation(*_initial_state(pool, random.Random(seed)))


def score(allocation: Allocation, scenario: Scenario, params: SAParams = DEFAULT_PARAMS) -> Score:
    pool = SlotPool(scenario)
    active, impl, hw = pool.from_allocation(allocation)
    return full_score(pool, active, impl, hw, params.subComponentUnassignedFactor,
                      params.softwareComponentUnassignedFactor)


def quality_ratio(solution: Score, optimal: Score):
    """``optimal.soft / solution.soft``; the string ``"invalid"`` if either score is invalid."""
    if solution.hard != 0 or optimal.hard != 0:
        return INVALID
    if solution.soft == 0:
        return 1.0 if optimal.soft == 0 else INVALID
    return optimal.soft / solution.soft


def sample_move(scorer: IncrementalScorer, rng: random.Random) -> Move | None:
    for _ in range(KIND_RETRIES):
        move = rng.choice(MOVE_KINDS)(scorer, rng)
        if move is not None:
            return move
    return None


def _movable(pool: SlotPool) -> bool:
    if pool.n_slots == 0 or pool.n_hw == 0:
        return False
    return pool.n_hw > 1 or any(len(opts) > 1 for opts in pool.slot_impls)


def acceptance_probability(cur: Score, cand: Score, t_hard: float, t_soft: float) -> float:
    dh = max(0.0, cand.hard - cur.hard)
    ds = max(0.0, cand.soft - cur.soft)
    return math.exp(-dh / t_hard - ds / t_soft)


def solve(scenario: Scenario, params: SAParams = DEFAULT_PARAMS, clock=None, *,
          until_valid: bool = False) -> tuple[Allocation, SolveTrace]:
    """Anneal until ``params.timeLimit`` on ``clock`` (wall clock by default).

    Each step draws ``neighborhoodSize`` candidate moves, keeps the best one
    and accepts it if it is not worse than the current allocation, otherwise
    with the two-level Metropolis probability. Returns the best allocation
    seen and the trace of best-score improvements. ``until_valid`` ends the
    run at the first valid allocation.
    """
    clock = clock or WallClock()
    rng = random.Random(params.seed)
    t0 = time.perf_counter()
    pool = SlotPool(scenario)
    active, impl, hw = _initial_state(pool, rng)
    scorer = IncrementalScorer(pool, active, impl, hw, params.subComponentUnassignedFactor,
                               params.softwareComponentUnassignedFactor)
    # under a virtual clock initialization costs one tick per pooled slot
    init = pool.n_slots / clock.rate if clock.virtual else time.perf_counter() - t0
    trace = SolveTrace(init_seconds=init)
    clock.start()

    current = scorer.score
    best = current
    best_state = (list(scorer.active), list(scorer.impl), list(scorer.hw))
    trace.record(clock.now(), current)

    t0_hard = params.hardScoreStartingTemperature / 100.0 * max(1, current.hard)
    t0_soft = params.softScoreStartingTemperature / 100.0 * current.soft
    limit = params.timeLimit
    n = int(params.neighborhoodSize)

    if _movable(pool) and not (until_valid and current.hard == 0):
        while clock.now() < limit:
            cand_move = None
            cand_score = None
            for _ in range(n):
                move = sample_move(scorer, rng)
                clock.tick()
                trace.evaluations += 1
                if move is None:
                    continue
                move.apply(scorer)
                sc = scorer.score
                move.undo(scorer)
                if cand_score is None or sc < cand_score:
                    cand_move, cand_score = move, sc
            trace.steps += 1
            if cand_move is None:
                continue
            if cand_score <= current:
                accept = True
            else:
                cooled = max(0.0, 1.0 - clock.now() / limit)
                t_hard = max(MIN_TEMPERATURE, t0_hard * cooled)
                t_soft = max(MIN_TEMPERATURE, t0_soft * cooled)
                accept = rng.random() < acceptance_probability(current, cand_score, t_hard, t_soft)
            if accept:
                cand_move.apply(scorer)
                current = cand_score
                if current < best:
                    best = current
                    best_state = (list(scorer.active), list(scorer.impl), list(scorer.hw))
                    trace.record(min(clock.now(), limit), best)
                    if until_valid and best.hard == 0:
                        break
    return pool.to_allocation(*best_state), trace
