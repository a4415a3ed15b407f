"""Seeded scenario generator.

The generator first lays out a forest of component types (one tree per root
type, ``branching`` children per node down to ``software_depth`` levels),
draws implementations for every type, then builds a witness: a complete
implementation tree per request mapped onto hardware. Request bounds,
sub-requirement bounds and hardware capacities are derived from the witness,
so every generated scenario is solvable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .tasks import path_to_str
from .types import (
    RESOURCE_KINDS,
    ComponentType,
    HardwareComponent,
    Implementation,
    Request,
    Scenario,
    SubRequirement,
)

MAX_TYPES = 100_000
NFP_QUALITY = "quality"
NFP_LATENCY = "latency"


class GeneratorError(ValueError):
    """Unsatisfiable generator parameters."""


@dataclass(frozen=True)
class Family:
    name: str
    requests: int
    root_types: int
    software_depth: int
    branching: int
    impls_per_type: int
    hardware: int

    @property
    def hardware_scale(self) -> float:
        return self.hardware / max(self.requests, 1)

    def generate(self, seed: int = 0) -> Scenario:
        return generate_scenario(self.requests, self.hardware_scale, self.software_depth, self.branching, seed,
                                 impls_per_type=self.impls_per_type, root_types=self.root_types, family=self.name)


# implementation and hardware counts per size class
SIZE_FAMILIES: tuple[Family, ...] = (
    Family("trivial", 1, 1, 1, 1, 1, 1),
    Family("small", 1, 1, 2, 2, 2, 5),
    Family("small, much hardware", 1, 1, 2, 2, 2, 15),
    Family("small, complex software", 1, 1, 5, 2, 2, 47),
    Family("medium", 12, 5, 2, 2, 2, 68),
    Family("medium, much hardware", 12, 5, 2, 2, 2, 225),
    Family("medium, complex software", 12, 5, 5, 2, 1, 465),
    Family("large", 20, 10, 2, 2, 2, 90),
    Family("large, much hardware", 20, 10, 2, 2, 2, 300),
    Family("large, complex software", 20, 5, 5, 2, 2, 930),
    Family("huge", 50, 25, 2, 2, 2, 225),
    Family("huge, much hardware", 50, 25, 2, 2, 2, 750),
    Family("huge, complex software", 50, 10, 5, 2, 2, 2325),
)


def scaling_family(hwc: int) -> Family:
    """4 requests, each asking for a software chain of length 4, on ``hwc`` hardware units."""
    return Family(f"chain4x4-{hwc}", 4, 1, 4, 1, 2, hwc)


def hardware_count(requests: int, hardware_scale: float) -> int:
    return max(1, round(hardware_scale * max(requests, 1)))


def generate_scenario(requests: int, hardware_scale: float, software_depth: int, branching: int, seed: int, *,
                      impls_per_type: int = 1, root_types: int = 1, family: str = "custom",
                      max_capacity: float | None = None, max_retries: int = 20) -> Scenario:
    """Generate a solvable scenario.

    ``max_capacity`` caps every hardware capacity; if the witness cannot be
    packed under the cap within ``max_retries`` attempts a
    :class:`GeneratorError` is raised.
    """
    if requests < 0:
        raise ValueError("requests must be >= 0")
    if not hardware_scale > 0:
        raise ValueError("hardware_scale must be positive")
    if software_depth < 1 or branching < 1 or impls_per_type < 1 or root_types < 1:
        raise ValueError("software_depth, branching, impls_per_type and root_types must be >= 1")
    per_root = sum(branching ** level for level in range(software_depth))
    if per_root * root_types > MAX_TYPES:
        raise GeneratorError(f"too many component types ({per_root * root_types})")

    n_hw = hardware_count(requests, hardware_scale)
    params = dict(requests=requests, hardware_scale=hardware_scale, software_depth=software_depth,
                  branching=branching, impls_per_type=impls_per_type, root_types=root_types)
    for attempt in range(max_retries):
        # separate streams keep the software side identical when only the hardware count changes
        rngs = tuple(random.Random(f"{seed}:{attempt}:{part}") for part in ("sw", "hw", "witness"))
        scenario = _attempt(rngs, requests, n_hw, software_depth, branching, impls_per_type, root_types, max_capacity)
        if scenario is not None:
            types, impls, hardware, reqs, witness = scenario
            meta = {"family": family, "seed": seed, "attempt": attempt, "params": params, "witness": witness}
            return Scenario(types, impls, hardware, reqs, meta)
    raise GeneratorError(f"unsatisfiable generator parameters: witness did not fit after {max_retries} retries")


def _attempt(rngs, n_requests, n_hw, depth, branching, ipt, n_roots, max_capacity):
    rng, hw_rng, w_rng = rngs
    # component type forest
    types: list[ComponentType] = []
    children: dict[str, list[str]] = {}

    def add_type(tid, level):
        types.append(ComponentType(tid, f"component {tid}"))
        children[tid] = []
        if level + 1 < depth:
            for b in range(branching):
                cid = f"{tid}_{b}"
                children[tid].append(cid)
                add_type(cid, level + 1)

    roots = [f"T{r}" for r in range(n_roots)]
    for root in roots:
        add_type(root, 0)

    # implementation skeletons: provides, demand and which children each requires
    impl_ids: dict[str, list[str]] = {}
    provides: dict[str, dict[str, float]] = {}
    demand: dict[str, list[float]] = {}
    req_types: dict[str, list[str]] = {}
    for t in types:
        impl_ids[t.id] = []
        for k in range(ipt):
            iid = f"I{t.id[1:]}_{k}"
            impl_ids[t.id].append(iid)
            provides[iid] = {NFP_QUALITY: float(rng.randint(1, 10)), NFP_LATENCY: float(rng.randint(5, 100))}
            demand[iid] = [float(rng.randint(1, 10)) for _ in RESOURCE_KINDS]
            kids = children[t.id]
            if k == 0 or not kids:
                chosen = list(kids)
            else:
                chosen = [c for c in kids if rng.random() < 0.5] or [rng.choice(kids)]
            req_types[iid] = chosen

    hw_ids = [f"H{i}" for i in range(n_hw)]
    coeff = [[float(hw_rng.randint(1, 5)) for _ in RESOURCE_KINDS] for _ in hw_ids]
    baseline = [[float(hw_rng.randint(8, 24)) for _ in RESOURCE_KINDS] for _ in hw_ids]

    # witness trees
    witness: dict[str, list[list[str]]] = {}
    witness_children: dict[tuple[str, str], list[str]] = {}
    load = [[0.0] * len(RESOURCE_KINDS) for _ in hw_ids]
    order = list(range(n_hw))
    hw_rng.shuffle(order)
    cursor = 0
    request_roots = []
    for r in range(n_requests):
        target = roots[r % n_roots]
        rows: list[list[str]] = []

        def place(type_id, path):
            nonlocal cursor
            iid = w_rng.choice(impl_ids[type_id])
            h = order[cursor % n_hw]
            cursor += 1
            for k, v in enumerate(demand[iid]):
                load[h][k] += v
            rows.append([path_to_str(path), iid, hw_ids[h]])
            for ctype in req_types[iid]:
                child_iid = place(ctype, path + ((ctype, 0),))
                witness_children.setdefault((iid, ctype), []).append(child_iid)
            return iid

        root_impl = place(target, ())
        witness[f"R{r}"] = rows
        request_roots.append((target, root_impl))

    capacities = []
    for h in range(n_hw):
        caps = [max(b, l) for b, l in zip(baseline[h], load[h])]
        if max_capacity is not None:
            if any(l > max_capacity for l in load[h]):
                return None
            caps = [min(c, max_capacity) for c in caps]
        capacities.append(caps)

    hardware = tuple(
        HardwareComponent(hw_ids[h], tuple(capacities[h]), tuple(coeff[h])) for h in range(n_hw)
    )

    impls = []
    for t in types:
        for iid in impl_ids[t.id]:
            subs = []
            for ctype in req_types[iid]:
                anchors = witness_children.get((iid, ctype)) or [w_rng.choice(impl_ids[ctype])]
                q = min(provides[a][NFP_QUALITY] for a in anchors)
                lat = max(provides[a][NFP_LATENCY] for a in anchors)
                subs.append(SubRequirement.create(
                    ctype,
                    {NFP_QUALITY: max(0.0, q - w_rng.randint(0, 3))},
                    {NFP_LATENCY: lat + w_rng.randint(0, 30)},
                ))
            impls.append(Implementation(iid, t.id, tuple(sorted(provides[iid].items())),
                                        tuple(demand[iid]), tuple(subs)))

    reqs = []
    for r, (target, root_impl) in enumerate(request_roots):
        p = provides[root_impl]
        reqs.append(Request.create(
            f"R{r}", target,
            {NFP_QUALITY: max(0.0, p[NFP_QUALITY] - w_rng.randint(0, 3))},
            {NFP_LATENCY: p[NFP_LATENCY] + w_rng.randint(0, 30)},
        ))
    return tuple(types), tuple(impls), hardware, tuple(reqs), witness
