"""Straight-line validity check working on ids only.

Deliberately shares no code with the scorer or the slot pool, so that
``hard == 0`` can be checked against an independent reading of the
constraints.
"""

from __future__ import annotations

import math
from collections import defaultdict

from ..model.types import RESOURCE_KINDS, Scenario


def _ok(provides, nfp_min, nfp_max):
    prov = dict(provides)
    return (all(name in prov and prov[name] >= b for name, b in nfp_min)
            and all(name in prov and prov[name] <= b for name, b in nfp_max))


def violations(scenario: Scenario, allocation) -> list[str]:
    """Every violated constraint of ``allocation``, as readable strings; empty means valid."""
    impls = {i.id: i for i in scenario.implementations}
    hws = {h.id: h for h in scenario.hardware}
    out: list[str] = []
    by_path: dict[tuple[str, tuple], object] = {}
    for a in allocation.assignments:
        by_path[(a.request_id, tuple(a.slot_path))] = a

    for req in scenario.requests:
        root = by_path.get((req.id, ()))
        if root is None or not root.active:
            out.append(f"request {req.id}: not served")
            continue
        impl = impls.get(root.impl)
        if impl is None or impl.of_type != req.target:
            out.append(f"request {req.id}: root implementation {root.impl!r} does not provide {req.target}")
        elif not _ok(impl.provides, req.nfp_min, req.nfp_max):
            out.append(f"request {req.id}: {impl.id} violates requested NFP bounds")

    usage: dict[tuple[str, int], list[float]] = defaultdict(list)
    for a in allocation.assignments:
        if not a.active:
            continue
        impl = impls.get(a.impl)
        hw = hws.get(a.hw)
        if impl is None or hw is None:
            out.append(f"{a.request_id}:{a.slot_path}: unknown implementation or hardware")
            continue
        path = tuple(a.slot_path)
        if path and impl.of_type != path[-1][0]:
            out.append(f"{a.request_id}:{path}: {impl.id} has wrong type")
        for r, v in enumerate(impl.resource_req):
            usage[(hw.id, r)].append(v)

        if path:
            parent = by_path.get((a.request_id, path[:-1]))
            if parent is None or not parent.active or parent.impl not in impls:
                out.append(f"{a.request_id}:{path}: active below an inactive parent")
            else:
                pimpl = impls[parent.impl]
                wanted = dict(zip(pimpl.child_keys(), pimpl.requires)).get(path[-1])
                if wanted is None:
                    out.append(f"{a.request_id}:{path}: not required by parent {pimpl.id}")
                elif not _ok(impl.provides, wanted.nfp_min, wanted.nfp_max):
                    out.append(f"{a.request_id}:{path}: {impl.id} violates {pimpl.id}'s requirement")

        for key in impl.child_keys():
            child = by_path.get((a.request_id, path + (key,)))
            if child is None or not child.active:
                out.append(f"{a.request_id}:{path}: required child {key} missing")

    for (hid, r), vals in sorted(usage.items()):
        used = math.fsum(vals)
        if used > hws[hid].capacities[r]:
            out.append(f"hardware {hid}: {RESOURCE_KINDS[r].value} over capacity ({used} > {hws[hid].capacities[r]})")
    return out


def is_valid(scenario: Scenario, allocation) -> bool:
    return not violations(scenario, allocation)
