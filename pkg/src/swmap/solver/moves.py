"""The three move kinds. Each returns an undoable :class:`Move` or ``None`` (no-op marker)."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .pool import NO, SlotPool
from .score import IncrementalScorer

SWAP_ATTEMPTS = 8


@dataclass
class Move:
    kind: str
    changes: list[tuple[int, tuple[bool, int, int], tuple[bool, int, int]]]
    """``(slot, old state, new state)`` in application order."""

    def apply(self, scorer: IncrementalScorer) -> None:
        for i, _, new in self.changes:
            scorer.set_slot(i, *new)

    def undo(self, scorer: IncrementalScorer) -> None:
        for i, old, _ in reversed(self.changes):
            scorer.set_slot(i, *old)


def pick_impl(pool: SlotPool, slot: int, parent_impl: int, rng: random.Random) -> int:
    """Random implementation for ``slot``, preferring ones that meet its NFP bounds."""
    ok = pool.admissible(slot, parent_impl)
    if ok:
        return rng.choice(sorted(ok))
    return rng.choice(pool.slot_impls[slot])


def activate_subtree(pool: SlotPool, slot: int, parent_impl: int, rng: random.Random, out: list) -> None:
    """Append states activating ``slot`` and everything its new implementation requires."""
    s = pick_impl(pool, slot, parent_impl, rng)
    h = rng.randrange(pool.n_hw)
    out.append((slot, (True, s, h)))
    children = pool.children[slot]
    for key in pool.impl_child_keys[s]:
        activate_subtree(pool, children[key], s, rng, out)


def move_hwc_change(scorer: IncrementalScorer, rng: random.Random) -> Move | None:
    pool = scorer.pool
    if pool.n_hw < 2 or not scorer.active_list:
        return None
    i = rng.choice(scorer.active_list)
    old = scorer.state(i)
    h = rng.randrange(pool.n_hw - 1)
    if h >= old[2]:
        h += 1
    return Move("hwc_change", [(i, old, (True, old[1], h))])


def move_hwc_swap(scorer: IncrementalScorer, rng: random.Random) -> Move | None:
    act = scorer.active_list
    if len(act) < 2 or scorer.pool.n_hw < 2:
        return None
    for _ in range(SWAP_ATTEMPTS):
        i, j = rng.sample(act, 2)
        a, b = scorer.state(i), scorer.state(j)
        if a[2] != b[2]:
            return Move("hwc_swap", [(i, a, (True, a[1], b[2])), (j, b, (True, b[1], a[2]))])
    return None


def move_swc_change(scorer: IncrementalScorer, rng: random.Random) -> Move | None:
    """Switch one active slot to another implementation of its type.

    Children only the old implementation required are deactivated, children
    only the new one requires are activated with random choices, and kept
    children that no longer meet the new sub-requirement are switched to a
    random admissible implementation and hardware unit the same way.
    """
    pool = scorer.pool
    if not scorer.active_list:
        return None
    i = rng.choice(scorer.active_list)
    options = pool.slot_impls[i]
    if len(options) < 2:
        return None
    old = scorer.state(i)
    s = rng.choice([x for x in options if x != old[1]])
    changes: list = []
    _switch(scorer, i, s, old[2], rng, changes)
    return Move("swc_change", changes)


def _switch(scorer, i, s, h, rng, changes) -> None:
    pool = scorer.pool
    old = scorer.state(i)
    changes.append((i, old, (True, s, h)))
    old_keys = set(pool.impl_child_keys[old[1]])
    new_keys = pool.impl_child_keys[s]
    children = pool.children[i]
    for key in pool.impl_child_keys[old[1]]:
        if key not in new_keys:
            _deactivate_subtree(scorer, children[key], changes)
    for key in new_keys:
        c = children[key]
        if key not in old_keys:
            fresh: list = []
            activate_subtree(pool, c, s, rng, fresh)
            changes.extend((j, scorer.state(j), st) for j, st in fresh)
        else:
            ok = pool.admissible(c, s)
            if ok and scorer.impl[c] not in ok:
                _switch(scorer, c, rng.choice(sorted(ok)), rng.randrange(pool.n_hw), rng, changes)


def _deactivate_subtree(scorer, slot, changes):
    if not scorer.active[slot]:
        return
    changes.append((slot, scorer.state(slot), (False, NO, NO)))
    for c in scorer.pool.child_list[slot]:
        _deactivate_subtree(scorer, c, changes)


MOVE_KINDS = (move_hwc_change, move_hwc_swap, move_swc_change)
