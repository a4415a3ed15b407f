"""Simulated-annealing solver: worst-case assignment pool, moves, hard/soft scoring."""

from .anneal import (
    DEFAULT_PARAMS,
    INVALID,
    PARAMETER_DOMAINS,
    SAParams,
    SolveTrace,
    initial_allocation,
    quality_ratio,
    score,
    solve,
)
from .moves import Move, move_hwc_change, move_hwc_swap, move_swc_change
from .pool import Allocation, ComponentAssignment, SlotPool, compute_max_assignments
from .score import ExactSum, IncrementalScorer, Score, full_score
from .validate import is_valid, violations
