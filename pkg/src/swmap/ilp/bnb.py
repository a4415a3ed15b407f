"""Depth-first branch and bound over task -> (implementation, hardware) choices.

Intended as an optimality oracle for small instances only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..model.types import Scenario
from ..solver.pool import NO, Allocation, SlotPool

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
BUDGET = "budget"


class _BudgetExhausted(Exception):
    pass


@dataclass
class ExactSolution:
    assignment: dict[int, tuple[str, str]] = field(default_factory=dict)
    """Active task index -> (implementation id, hardware id)."""
    objective: float | None = None
    status: str = INFEASIBLE
    nodesExplored: int = 0

    @property
    def provedOptimal(self) -> bool:
        return self.status == OPTIMAL

    @property
    def feasible(self) -> bool:
        return self.objective is not None

    def to_allocation(self, scenario: Scenario) -> Allocation:
        pool = SlotPool(scenario)
        n = pool.n_slots
        active, impl, hw = [False] * n, [NO] * n, [NO] * n
        for t, (s, h) in self.assignment.items():
            active[t], impl[t], hw[t] = True, pool.impl_pos[s], pool.hw_pos[h]
        return pool.to_allocation(active, impl, hw)


class _Search:
    def __init__(self, pool: SlotPool, budget: int):
        self.pool = pool
        self.budget = budget
        self.nodes = 0
        self.best = math.inf
        self.best_assign: dict[int, tuple[int, int]] | None = None
        self.usage = [[[] for _ in range(pool.n_kinds)] for _ in range(pool.n_hw)]
        self.min_energy = [min((pool.energy(s, h) for h in range(pool.n_hw)), default=math.inf)
                           for s in range(len(pool.impls))]
        self._subtree: dict[tuple[int, int], float] = {}

    def options(self, t: int, parent_impl: int) -> tuple[int, ...]:
        pool = self.pool
        if pool.parent[t] == NO:
            return tuple(sorted(pool.root_ok[t]))
        return tuple(sorted(pool.sub_ok(parent_impl, pool.key[t])))

    def subtree(self, t: int, parent_impl: int) -> float:
        """Cheapest energy of slot ``t`` and everything below it, ignoring capacities."""
        k = (t, parent_impl)
        got = self._subtree.get(k)
        if got is None:
            got = math.inf
            for s in self.options(t, parent_impl):
                got = min(got, self.impl_floor(t, s))
            self._subtree[k] = got
        return got

    def impl_floor(self, t: int, s: int) -> float:
        children = self.pool.children[t]
        return self.min_energy[s] + sum(self.subtree(children[key], s) for key in self.pool.impl_child_keys[s])

    def run(self):
        pool = self.pool
        pending = [(r, NO) for r in pool.roots]
        if sum(self.subtree(t, p) for t, p in pending) < math.inf:
            self._dfs(pending, 0.0, {})

    def _dfs(self, pending, energy, chosen):
        if not pending:
            if energy < self.best:
                self.best = energy
                self.best_assign = dict(chosen)
            return
        pool = self.pool
        # most expensive pending task first
        j = max(range(len(pending)), key=lambda q: (self.subtree(*pending[q]), -pending[q][0]))
        t, p = pending[j]
        rest = pending[:j] + pending[j + 1:]
        rest_bound = sum(self.subtree(*q) for q in rest)
        children = pool.children[t]
        opts = []
        for s in self.options(t, p):
            floor_children = self.impl_floor(t, s) - self.min_energy[s]
            for h in range(pool.n_hw):
                opts.append((pool.energy(s, h) + floor_children, s, h))
        opts.sort()
        for value, s, h in opts:
            if energy + value + rest_bound >= self.best:
                break
            req = pool.impl_req[s]
            use = self.usage[h]
            cap = pool.caps[h]
            if any(v and math.fsum(use[r] + [v]) > cap[r] for r, v in enumerate(req)):
                continue
            self.nodes += 1
            if self.nodes > self.budget:
                raise _BudgetExhausted
            for r, v in enumerate(req):
                use[r].append(v)
            chosen[t] = (s, h)
            kids = [(children[key], s) for key in pool.impl_child_keys[s]]
            self._dfs(rest + kids, energy + pool.energy(s, h), chosen)
            del chosen[t]
            for r in range(len(req)):
                use[r].pop()


def exact_solve(scenario: Scenario, nodeBudget: int = 1_000_000) -> ExactSolution:
    """Minimum-energy valid assignment, or the best found when the node budget runs out.

    Branching picks the pending task with the highest energy floor first and
    tries its (implementation, hardware) options cheapest first.
    """
    pool = SlotPool(scenario)
    search = _Search(pool, nodeBudget)
    try:
        search.run()
        status = OPTIMAL if search.best_assign is not None else INFEASIBLE
    except _BudgetExhausted:
        status = BUDGET
    sol = ExactSolution(status=status, nodesExplored=search.nodes)
    if search.best_assign is not None:
        sol.assignment = {t: (pool.impls[s].id, pool.hws[h].id) for t, (s, h) in search.best_assign.items()}
        sol.objective = math.fsum(pool.energy(s, h) for s, h in search.best_assign.values())
    return sol
