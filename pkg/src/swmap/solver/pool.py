"""Integer-indexed view of a scenario used by the solver.

Building a :class:`SlotPool` is the heuristic's whole transformation step:
one pass over types, implementations, hardware and the worst-case task tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..model.tasks import Task, decompose_tasks
from ..model.types import RESOURCE_KINDS, Scenario, ScenarioError, assignment_energy, satisfies

NO = -1


@dataclass
class ComponentAssignment:
    id: str
    request_id: str
    slot_path: tuple
    active: bool = False
    impl: str | None = None
    hw: str | None = None


@dataclass
class Allocation:
    assignments: list[ComponentAssignment] = field(default_factory=list)

    def active(self) -> list[ComponentAssignment]:
        return [a for a in self.assignments if a.active]

    def __len__(self):
        return len(self.assignments)


def compute_max_assignments(scenario: Scenario, request) -> int:
    """Worst-case number of component assignments needed to serve ``request``.

    Counts, per type, the root plus the worst case of every child slot any of
    its implementations may demand.
    """
    if isinstance(request, str):
        request = scenario.request_by_id[request]
    memo: dict[str, int] = {}
    on_stack: set[str] = set()

    def count(type_id):
        if type_id in memo:
            return memo[type_id]
        if type_id in on_stack:
            raise ScenarioError(f"cyclic component requirements through {type_id!r}")
        on_stack.add(type_id)
        slots: dict[tuple[str, int], None] = {}
        for impl in scenario.impls_by_type[type_id]:
            for key in impl.child_keys():
                slots[key] = None
        total = 1 + sum(count(child) for child, _ in slots)
        on_stack.discard(type_id)
        memo[type_id] = total
        return total

    return count(request.target)


class SlotPool:
    """Tasks, implementations and hardware flattened to integer ids."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.tasks: list[Task] = decompose_tasks(scenario)
        self.impls = list(scenario.implementations)
        self.hws = list(scenario.hardware)
        self.impl_pos = {impl.id: k for k, impl in enumerate(self.impls)}
        self.hw_pos = {h.id: k for k, h in enumerate(self.hws)}
        self.n_slots = len(self.tasks)
        self.n_hw = len(self.hws)
        self.n_kinds = len(RESOURCE_KINDS)

        self.parent = [t.parent if t.parent is not None else NO for t in self.tasks]
        self.key = [t.slot_path[-1] if t.slot_path else None for t in self.tasks]
        self.children = [dict(t.children) for t in self.tasks]
        self.child_list = [tuple(t.children.values()) for t in self.tasks]
        self.slot_type = [t.component_type for t in self.tasks]
        self.roots = [t.index for t in self.tasks if t.is_root]

        by_type = scenario.impls_by_type
        self.type_impls = {t: tuple(self.impl_pos[i.id] for i in impls) for t, impls in by_type.items()}
        self.slot_impls = [self.type_impls[t] for t in self.slot_type]
        self.impl_req = [impl.resource_req for impl in self.impls]
        self.impl_child_keys = [impl.child_keys() for impl in self.impls]
        self.impl_subreq = [dict(zip(impl.child_keys(), impl.requires)) for impl in self.impls]
        self.caps = [h.capacities for h in self.hws]

        # C2: implementations admissible at each root slot
        self.root_ok: dict[int, frozenset[int]] = {}
        for r in self.roots:
            t = self.tasks[r]
            self.root_ok[r] = frozenset(
                s for s in self.slot_impls[r] if satisfies(self.impls[s].provides, t.nfp_min, t.nfp_max)
            )
        self._sub_ok: dict[tuple[int, tuple], frozenset[int]] = {}
        self._energy: dict[tuple[int, int], float] = {}

    def sub_ok(self, parent_impl: int, key) -> frozenset[int]:
        """Child implementations satisfying ``parent_impl``'s requirement on slot ``key``."""
        k = (parent_impl, key)
        got = self._sub_ok.get(k)
        if got is None:
            sub = self.impl_subreq[parent_impl][key]
            got = frozenset(
                s for s in self.type_impls[key[0]]
                if satisfies(self.impls[s].provides, sub.nfp_min, sub.nfp_max)
            )
            self._sub_ok[k] = got
        return got

    def energy(self, s: int, h: int) -> float:
        k = (s, h)
        e = self._energy.get(k)
        if e is None:
            e = self._energy[k] = assignment_energy(self.impls[s], self.hws[h])
        return e

    def admissible(self, slot: int, parent_impl: int) -> frozenset[int] | tuple[int, ...]:
        """Implementations that would satisfy the slot's own NFP bounds (type-compatible fallback)."""
        if self.parent[slot] == NO:
            ok = self.root_ok[slot]
        else:
            ok = self.sub_ok(parent_impl, self.key[slot])
        return ok

    # conversions -----------------------------------------------------------------
    def to_allocation(self, active, impl, hw) -> Allocation:
        out = []
        for t in self.tasks:
            i = t.index
            out.append(ComponentAssignment(
                t.id, t.request_id, t.slot_path, bool(active[i]),
                self.impls[impl[i]].id if impl[i] != NO else None,
                self.hws[hw[i]].id if hw[i] != NO else None,
            ))
        return Allocation(out)

    def from_allocation(self, allocation: Allocation):
        if len(allocation.assignments) != self.n_slots:
            raise ScenarioError(
                f"allocation has {len(allocation.assignments)} assignments, scenario needs {self.n_slots}")
        active, impl, hw = [], [], []
        for t, a in zip(self.tasks, allocation.assignments):
            if a.request_id != t.request_id or tuple(a.slot_path) != t.slot_path:
                raise ScenarioError(f"assignment {a.id!r} does not match slot {t.id!r}")
            try:
                s = self.impl_pos[a.impl] if a.impl is not None else NO
                h = self.hw_pos[a.hw] if a.hw is not None else NO
            except KeyError as exc:
                raise ScenarioError(f"assignment {a.id!r} references unknown id {exc.args[0]!r}") from None
            if a.active and (s == NO or h == NO):
                raise ScenarioError(f"active assignment {a.id!r} lacks implementation or hardware")
            if s != NO and self.impls[s].of_type != t.component_type:
                raise ScenarioError(f"assignment {a.id!r}: implementation {a.impl!r} is not of type "
                                    f"{t.component_type!r}")
            active.append(bool(a.active))
            impl.append(s)
            hw.append(h)
        return active, impl, hw
