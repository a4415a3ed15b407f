"""First-valid window sweep over hardware counts."""

from __future__ import annotations

import math
import statistics

from ..clock import make_clock
from ..ilp import build_ilp
from ..model import Family, scaling_family
from ..solver import SAParams, solve
from .common import NA, to_csv

SCALING_HEADER = ("hwc", "implementations", "ilp_vars", "ilp_gen_s", "mh_init_s", "mh_first_valid_s", "window_s")
SCALING_HWC = (64, 128, 256, 512, 1024)


def scaling_row(family: Family, params: SAParams, seed: int = 0, virtual_clock: bool = False, reps: int = 3) -> dict:
    """Median over ``reps`` repetitions of each timing; the scenario is generated once."""
    scenario = family.generate(seed)
    gens, inits, firsts = [], [], []
    n_vars = None
    for r in range(reps):
        model, gen = build_ilp(scenario, make_clock(virtual_clock))
        n_vars = model.n_vars
        _, trace = solve(scenario, params.with_(seed=params.seed + r), make_clock(virtual_clock),
                         until_valid=True)
        gens.append(gen)
        inits.append(trace.init_seconds)
        firsts.append(math.inf if trace.firstValidAt is None else trace.firstValidAt)
    gen, first = statistics.median(gens), statistics.median(firsts)
    return dict(hwc=len(scenario.hardware), implementations=len(scenario.implementations), ilp_vars=n_vars,
                ilp_gen_s=gen, mh_init_s=statistics.median(inits), mh_first_valid_s=first,
                window_s=NA if math.isinf(first) else gen - first)


def scaling_rows(hwc_counts=SCALING_HWC, params: SAParams | None = None, seed: int = 0, virtual_clock: bool = False,
                 reps: int = 3, family=scaling_family) -> list[dict]:
    counts = list(hwc_counts)
    if counts != sorted(counts):
        raise ValueError("hardware counts must be ascending")
    params = params or SAParams(timeLimit=10.0)
    return [scaling_row(family(h), params, seed, virtual_clock, reps) for h in counts]


def bench_scaling(hwc_counts=SCALING_HWC, params: SAParams | None = None, seed: int = 0, virtual_clock: bool = False,
                  reps: int = 3) -> str:
    return to_csv(SCALING_HEADER, scaling_rows(hwc_counts, params, seed, virtual_clock, reps))
