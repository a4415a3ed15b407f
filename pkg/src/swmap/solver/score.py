"""Hard/soft scoring: a full rescorer and an incremental scorer that must agree exactly.

Sums are kept exact (Shewchuk partials) so that incremental add/remove
sequences and a from-scratch :func:`math.fsum` give bit-identical floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .pool import NO, SlotPool


@dataclass(frozen=True, order=True)
class Score:
    """Lexicographic score: lower ``hard`` wins, ties broken by lower ``soft``."""

    hard: int
    soft: float

    @property
    def valid(self) -> bool:
        return self.hard == 0

    def __str__(self):
        return f"{self.hard}hard/{self.soft:g}soft"


class ExactSum:
    """Running sum supporting exact addition and removal of floats."""

    __slots__ = ("partials",)

    def __init__(self):
        self.partials: list[float] = []

    def add(self, x: float) -> None:
        partials = self.partials
        i = 0
        for y in partials:
            if abs(x) < abs(y):
                x, y = y, x
            hi = x + y
            lo = y - (hi - x)
            if lo:
                partials[i] = lo
                i += 1
            x = hi
        partials[i:] = [x]

    def value(self) -> float:
        return math.fsum(self.partials)


def slot_is_bad(pool: SlotPool, i: int, active, impl) -> bool:
    """Whether slot ``i`` counts as an unsatisfied software component.

    Inactive roots (request not served), active slots violating the request's
    or parent's NFP bounds, active slots nobody requires, and active slots
    missing a required child are all bad.
    """
    p = pool.parent[i]
    if not active[i]:
        return p == NO
    s = impl[i]
    if p == NO:
        if s not in pool.root_ok[i]:
            return True
    else:
        if not active[p]:
            return True
        key = pool.key[i]
        if key not in pool.impl_subreq[impl[p]]:
            return True
        if s not in pool.sub_ok(impl[p], key):
            return True
    children = pool.children[i]
    for key in pool.impl_child_keys[s]:
        if not active[children[key]]:
            return True
    return False


def full_score(pool: SlotPool, active, impl, hw, sub_factor: float, sw_factor: float) -> Score:
    """Score an allocation from scratch."""
    usage = [[[] for _ in range(pool.n_kinds)] for _ in range(pool.n_hw)]
    energies = []
    for i in range(pool.n_slots):
        if active[i]:
            s, h = impl[i], hw[i]
            for r, v in enumerate(pool.impl_req[s]):
                if v:
                    usage[h][r].append(v)
            energies.append(pool.energy(s, h))
    exceeded = 0
    for h in range(pool.n_hw):
        cap = pool.caps[h]
        for r in range(pool.n_kinds):
            if usage[h][r] and math.fsum(usage[h][r]) > cap[r]:
                exceeded += 1
    bad = sum(1 for i in range(pool.n_slots) if slot_is_bad(pool, i, active, impl))
    return Score(_hard(exceeded, bad, sub_factor, sw_factor), math.fsum(energies))


def _hard(exceeded, bad, sub_factor, sw_factor):
    h = sub_factor * exceeded + sw_factor * bad
    return int(h) if float(h).is_integer() else h


class IncrementalScorer:
    """Working allocation with a score maintained under single-slot updates."""

    def __init__(self, pool: SlotPool, active, impl, hw, sub_factor: float, sw_factor: float):
        self.pool = pool
        self.sub_factor = sub_factor
        self.sw_factor = sw_factor
        n = pool.n_slots
        self.active = [False] * n
        self.impl = [NO] * n
        self.hw = [NO] * n
        self.active_list: list[int] = []
        self._active_at = [-1] * n
        self.usage = [[ExactSum() for _ in range(pool.n_kinds)] for _ in range(pool.n_hw)]
        self.over = [[False] * pool.n_kinds for _ in range(pool.n_hw)]
        self.exceeded = 0
        self.energy = ExactSum()
        self.bad = [False] * n
        self.n_bad = 0
        for i in range(n):
            if pool.parent[i] == NO:
                self.bad[i] = True
                self.n_bad += 1
        for i in range(n):
            if active[i] or impl[i] != NO or hw[i] != NO:
                self.set_slot(i, active[i], impl[i], hw[i])

    @property
    def score(self) -> Score:
        return Score(_hard(self.exceeded, self.n_bad, self.sub_factor, self.sw_factor), self.energy.value())

    def state(self, i: int) -> tuple[bool, int, int]:
        return self.active[i], self.impl[i], self.hw[i]

    def set_slot(self, i: int, active: bool, s: int, h: int) -> None:
        pool = self.pool
        was_active, old_s, old_h = self.active[i], self.impl[i], self.hw[i]
        if was_active:
            self._load(old_s, old_h, -1.0)
            self.energy.add(-pool.energy(old_s, old_h))
            k = self._active_at[i]
            last = self.active_list.pop()
            if last != i:
                self.active_list[k] = last
                self._active_at[last] = k
            self._active_at[i] = -1
        self.active[i], self.impl[i], self.hw[i] = active, s, h
        if active:
            self._load(s, h, 1.0)
            self.energy.add(pool.energy(s, h))
            self._active_at[i] = len(self.active_list)
            self.active_list.append(i)
        if was_active != active or old_s != s:
            self._refresh_bad(i)
            p = pool.parent[i]
            if p != NO:
                self._refresh_bad(p)
            for c in pool.child_list[i]:
                self._refresh_bad(c)

    def _load(self, s, h, sign):
        req = self.pool.impl_req[s]
        cap = self.pool.caps[h]
        usage = self.usage[h]
        over = self.over[h]
        for r, v in enumerate(req):
            if v:
                u = usage[r]
                u.add(sign * v)
                now = u.value() > cap[r]
                if now != over[r]:
                    over[r] = now
                    self.exceeded += 1 if now else -1

    def _refresh_bad(self, i):
        b = slot_is_bad(self.pool, i, self.active, self.impl)
        if b != self.bad[i]:
            self.bad[i] = b
            self.n_bad += 1 if b else -1

    def full(self) -> Score:
        return full_score(self.pool, self.active, self.impl, self.hw, self.sub_factor, self.sw_factor)
