"""Decomposition of requests into tasks along the worst-case requirement tree.

A slot below a parent is keyed by ``(required type, occurrence)``: the k-th
requirement of a given type in an implementation's ``requires`` list. The
worst-case tree of a type holds the union of child keys over all of its
implementations, so any implementation choice activates a subset of it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .types import Scenario, ScenarioError

SlotKey = tuple[str, int]


@dataclass(frozen=True)
class Task:
    index: int
    request_id: str
    slot_path: tuple[SlotKey, ...]
    component_type: str
    parent: int | None
    children: dict = field(compare=False, hash=False)
    """Maps child slot key to the child task's index."""
    nfp_min: tuple[tuple[str, float], ...] = ()
    nfp_max: tuple[tuple[str, float], ...] = ()

    @property
    def id(self) -> str:
        return f"{self.request_id}:{path_to_str(self.slot_path)}"

    @property
    def is_root(self) -> bool:
        return self.parent is None


def path_to_str(path: tuple[SlotKey, ...]) -> str:
    return "/".join(f"{t}#{o}" for t, o in path)


def path_from_str(text: str) -> tuple[SlotKey, ...]:
    if not text:
        return ()
    out = []
    for part in text.split("/"):
        t, _, o = part.rpartition("#")
        if not t:
            raise ValueError(f"bad slot path segment {part!r}")
        out.append((t, int(o)))
    return tuple(out)


def child_key_union(scenario: Scenario, type_id: str) -> tuple[SlotKey, ...]:
    """Union of child slot keys over all implementations of ``type_id``, first-seen order."""
    keys: dict[SlotKey, None] = {}
    for impl in scenario.impls_by_type.get(type_id, ()):
        for key in impl.child_keys():
            keys.setdefault(key, None)
    return tuple(keys)


def check_acyclic(scenario: Scenario) -> None:
    """Raise :class:`ScenarioError` if component requirements form a cycle."""
    state: dict[str, int] = {}

    def visit(t, stack):
        mark = state.get(t)
        if mark == 2:
            return
        if mark == 1:
            cyc = stack[stack.index(t):] + [t]
            raise ScenarioError("cyclic component requirements: " + " -> ".join(cyc))
        state[t] = 1
        stack.append(t)
        for child, _ in child_key_union(scenario, t):
            visit(child, stack)
        stack.pop()
        state[t] = 2

    for ct in scenario.component_types:
        visit(ct.id, [])


def decompose_tasks(scenario: Scenario) -> list[Task]:
    """One task per (request, node of the worst-case requirement tree).

    Tasks are listed request by request in depth-first pre-order, so a
    parent always precedes its children. Root tasks carry the request's NFP
    bounds. Child tasks carry none: their bounds come from whichever
    implementation the parent picks and are checked as sub-requirements.
    """
    check_acyclic(scenario)
    tasks: list[Task] = []

    def build(req, type_id, path, parent, nfp_min, nfp_max):
        idx = len(tasks)
        children: dict[SlotKey, int] = {}
        tasks.append(Task(idx, req.id, path, type_id, parent, children, nfp_min, nfp_max))
        for key in child_key_union(scenario, type_id):
            children[key] = build(req, key[0], path + (key,), idx, (), ())
        return idx

    for req in scenario.requests:
        build(req, req.target, (), None, req.nfp_min, req.nfp_max)
    return tasks
