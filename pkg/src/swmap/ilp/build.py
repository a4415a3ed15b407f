"""ILP formulation of the mapping problem.

Binary ``x[t, s, h]`` is 1 iff task ``t`` runs implementation ``s`` on
hardware ``h``. Rows:

* ``assign_t``: a root task picks exactly one ``(s, h)``;
* ``link_t``: a child task is active exactly when its parent picked an
  implementation that requires it;
* ``cap_h_r``: utilization of resource ``r`` on ``h`` stays within capacity;
* ``sub_t_s_k``: if ``t`` picks ``s``, child slot ``k`` picks an
  implementation meeting ``s``'s requirement on it.

Implementations violating a root task's requested NFP bounds get no
variables at all.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from ..model.types import RESOURCE_KINDS, Scenario
from ..solver.pool import NO, SlotPool


@dataclass(frozen=True)
class Variable:
    name: str
    task: int
    impl: int
    hw: int


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[int, float], ...]
    sense: str
    rhs: float


@dataclass
class IlpModel:
    variables: list[Variable] = field(default_factory=list)
    objective: list[float] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    n_tasks: int = 0

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def n_rows(self) -> int:
        return len(self.constraints)

    def rows(self, prefix: str) -> list[Constraint]:
        return [c for c in self.constraints if c.name.startswith(prefix)]

    @property
    def n_nonzeros(self) -> int:
        return sum(len(c.terms) for c in self.constraints)


def task_candidates(pool: SlotPool, t: int) -> tuple[int, ...]:
    """Implementations that get variables for task ``t``."""
    if pool.parent[t] == NO:
        return tuple(sorted(pool.root_ok[t]))
    return pool.slot_impls[t]


def build_ilp(scenario: Scenario, clock=None) -> tuple[IlpModel, float]:
    """Build the ILP and return it with its generation time in seconds.

    With a virtual ``clock`` the time is counted from work units (one tick
    per variable and per constraint term) instead of measured.
    """
    t0 = time.perf_counter()
    if clock is not None:
        clock.start()
    pool = SlotPool(scenario)
    model = IlpModel(n_tasks=pool.n_slots)
    variables = model.variables
    objective = model.objective
    cons = model.constraints
    n_hw = pool.n_hw

    # var_block[t][s] -> list of variable indices over all hardware
    var_block: list[dict[int, list[int]]] = []
    on_hw: list[list[int]] = [[] for _ in range(n_hw)]
    for t in range(pool.n_slots):
        block: dict[int, list[int]] = {}
        for s in task_candidates(pool, t):
            idx = []
            for h in range(n_hw):
                k = len(variables)
                variables.append(Variable(f"x_{t}_{s}_{h}", t, s, h))
                objective.append(pool.energy(s, h))
                on_hw[h].append(k)
                idx.append(k)
            block[s] = idx
        var_block.append(block)

    for t in range(pool.n_slots):
        own = [k for idx in var_block[t].values() for k in idx]
        p = pool.parent[t]
        if p == NO:
            cons.append(Constraint(f"assign_{t}", tuple((k, 1.0) for k in own), "=", 1.0))
        else:
            key = pool.key[t]
            parents = [k for s, idx in var_block[p].items() if key in pool.impl_subreq[s] for k in idx]
            cons.append(Constraint(f"link_{t}", tuple([(k, 1.0) for k in own] + [(k, -1.0) for k in parents]),
                                   "=", 0.0))

    for h in range(n_hw):
        cap = pool.caps[h]
        for r, kind in enumerate(RESOURCE_KINDS):
            terms = tuple((k, pool.impl_req[variables[k].impl][r]) for k in on_hw[h]
                          if pool.impl_req[variables[k].impl][r])
            if terms:
                cons.append(Constraint(f"cap_{h}_{kind.value}", terms, "<=", cap[r]))

    for t in range(pool.n_slots):
        children = pool.children[t]
        for s, idx in var_block[t].items():
            for j, key in enumerate(pool.impl_child_keys[s]):
                c = children[key]
                ok = pool.sub_ok(s, key)
                fits = [k for s2, idx2 in var_block[c].items() if s2 in ok for k in idx2]
                terms = tuple([(k, 1.0) for k in idx] + [(k, -1.0) for k in fits])
                cons.append(Constraint(f"sub_{t}_{s}_{j}", terms, "<=", 0.0))

    if clock is not None:
        clock.tick(len(variables) + model.n_nonzeros)
        return model, clock.now()
    return model, time.perf_counter() - t0
