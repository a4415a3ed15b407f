"""Domain types for software selection and hardware mapping.

All types are frozen; a :class:`Scenario` can be shared freely between
concurrent solver runs and tuner evaluations.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping


class ResourceKind(str, enum.Enum):
    CPU = "cpu"
    RAM = "ram"
    DISK = "disk"
    NETWORK = "network"


RESOURCE_KINDS: tuple[ResourceKind, ...] = tuple(ResourceKind)


class ScenarioError(ValueError):
    """Raised for structurally invalid scenarios (dangling ids, cycles, ...)."""


def _frozen_map(values: Mapping | None) -> tuple[tuple[str, float], ...]:
    if not values:
        return ()
    return tuple(sorted((str(k), float(v)) for k, v in values.items()))


def _resource_vector(values: Mapping | None) -> tuple[float, ...]:
    values = dict(values or {})
    out = []
    for kind in RESOURCE_KINDS:
        v = values.get(kind, values.get(kind.value, 0.0))
        out.append(float(v))
    return tuple(out)


@dataclass(frozen=True)
class HardwareComponent:
    id: str
    capacities: tuple[float, ...]
    """Capacity per resource kind, in :data:`RESOURCE_KINDS` order."""
    energy_coeff: tuple[float, ...]

    @classmethod
    def create(cls, id: str, capacities: Mapping, energy_coeff: Mapping) -> "HardwareComponent":
        return cls(id, _resource_vector(capacities), _resource_vector(energy_coeff))

    def __post_init__(self):
        if len(self.capacities) != len(RESOURCE_KINDS) or len(self.energy_coeff) != len(RESOURCE_KINDS):
            raise ScenarioError(f"hardware {self.id!r}: one value per resource kind required")
        for v in self.capacities + self.energy_coeff:
            if not (v >= 0 and math.isfinite(v)):
                raise ScenarioError(f"hardware {self.id!r}: capacities and coefficients must be finite and >= 0")


@dataclass(frozen=True)
class ComponentType:
    id: str
    name: str = ""


@dataclass(frozen=True)
class SubRequirement:
    required_type: str
    nfp_min: tuple[tuple[str, float], ...] = ()
    nfp_max: tuple[tuple[str, float], ...] = ()

    @classmethod
    def create(cls, required_type: str, nfp_min: Mapping | None = None, nfp_max: Mapping | None = None):
        return cls(required_type, _frozen_map(nfp_min), _frozen_map(nfp_max))

    def __post_init__(self):
        _check_bounds(f"sub-requirement on {self.required_type!r}", self.nfp_min, self.nfp_max)


@dataclass(frozen=True)
class Implementation:
    id: str
    of_type: str
    provides: tuple[tuple[str, float], ...] = ()
    resource_req: tuple[float, ...] = (0.0, 0.0, 0.0, 0.0)
    requires: tuple[SubRequirement, ...] = ()

    @classmethod
    def create(cls, id: str, of_type: str, provides: Mapping | None = None,
               resource_req: Mapping | None = None, requires=()) -> "Implementation":
        return cls(id, of_type, _frozen_map(provides), _resource_vector(resource_req), tuple(requires))

    def __post_init__(self):
        if len(self.resource_req) != len(RESOURCE_KINDS):
            raise ScenarioError(f"implementation {self.id!r}: one requirement per resource kind required")
        if any(not (v >= 0 and math.isfinite(v)) for v in self.resource_req):
            raise ScenarioError(f"implementation {self.id!r}: resource requirements must be finite and >= 0")

    def child_keys(self) -> tuple[tuple[str, int], ...]:
        """Slot keys ``(type, occurrence)`` of the required children, in order."""
        seen: dict[str, int] = {}
        keys = []
        for sub in self.requires:
            occ = seen.get(sub.required_type, 0)
            seen[sub.required_type] = occ + 1
            keys.append((sub.required_type, occ))
        return tuple(keys)


@dataclass(frozen=True)
class Request:
    id: str
    target: str
    nfp_min: tuple[tuple[str, float], ...] = ()
    nfp_max: tuple[tuple[str, float], ...] = ()

    @classmethod
    def create(cls, id: str, target: str, nfp_min: Mapping | None = None, nfp_max: Mapping | None = None):
        return cls(id, target, _frozen_map(nfp_min), _frozen_map(nfp_max))

    def __post_init__(self):
        _check_bounds(f"request {self.id!r}", self.nfp_min, self.nfp_max)


def _check_bounds(what, nfp_min, nfp_max):
    lo = dict(nfp_min)
    for name, hi in nfp_max:
        if name in lo and lo[name] > hi:
            raise ScenarioError(f"{what}: nfp {name!r} has min {lo[name]} > max {hi}")


def satisfies(provides: tuple[tuple[str, float], ...], nfp_min, nfp_max) -> bool:
    """True iff provided NFP levels respect both bound maps.

    A bound on an NFP that the implementation does not provide is violated.
    """
    prov = dict(provides)
    for name, bound in nfp_min:
        v = prov.get(name)
        if v is None or v < bound:
            return False
    for name, bound in nfp_max:
        v = prov.get(name)
        if v is None or v > bound:
            return False
    return True


def assignment_energy(impl: Implementation, hw: HardwareComponent) -> float:
    """Energy of running ``impl`` on ``hw``: sum over kinds of coefficient times demand."""
    return math.fsum(c * r for c, r in zip(hw.energy_coeff, impl.resource_req))


@dataclass(frozen=True)
class Scenario:
    component_types: tuple[ComponentType, ...]
    implementations: tuple[Implementation, ...]
    hardware: tuple[HardwareComponent, ...]
    requests: tuple[Request, ...]
    meta: Mapping = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        self._check_integrity()

    def _check_integrity(self):
        dangling = []
        dup = []
        for label, items in (("component type", self.component_types), ("implementation", self.implementations),
                             ("hardware", self.hardware), ("request", self.requests)):
            ids = [x.id for x in items]
            if len(set(ids)) != len(ids):
                dup.extend(f"{label} {i!r}" for i in sorted({i for i in ids if ids.count(i) > 1}))
        if dup:
            raise ScenarioError("duplicate ids: " + ", ".join(dup))
        types = {t.id for t in self.component_types}
        for impl in self.implementations:
            if impl.of_type not in types:
                dangling.append(impl.of_type)
            dangling.extend(s.required_type for s in impl.requires if s.required_type not in types)
        for req in self.requests:
            if req.target not in types:
                dangling.append(req.target)
        if dangling:
            raise ScenarioError("unknown component type ids: " + ", ".join(sorted(set(dangling))))
        implemented = {i.of_type for i in self.implementations}
        referenced = {r.target for r in self.requests}
        referenced.update(s.required_type for i in self.implementations for s in i.requires)
        missing = sorted(referenced - implemented)
        if missing:
            raise ScenarioError("component types without implementations: " + ", ".join(missing))

    # lookups are cached lazily; the dataclass is frozen so use object.__setattr__
    def _index(self, name, builder):
        cache = self.__dict__.get("_cache")
        if cache is None:
            cache = {}
            object.__setattr__(self, "_cache", cache)
        if name not in cache:
            cache[name] = builder()
        return cache[name]

    @property
    def impl_by_id(self) -> dict[str, Implementation]:
        return self._index("impl", lambda: {i.id: i for i in self.implementations})

    @property
    def hw_by_id(self) -> dict[str, HardwareComponent]:
        return self._index("hw", lambda: {h.id: h for h in self.hardware})

    @property
    def request_by_id(self) -> dict[str, Request]:
        return self._index("req", lambda: {r.id: r for r in self.requests})

    @property
    def impls_by_type(self) -> dict[str, tuple[Implementation, ...]]:
        def build():
            out: dict[str, list] = {t.id: [] for t in self.component_types}
            for impl in self.implementations:
                out[impl.of_type].append(impl)
            return {k: tuple(v) for k, v in out.items()}
        return self._index("by_type", build)

    def structurally_equal(self, other: "Scenario") -> bool:
        return self == other and dict(self.meta) == dict(other.meta)
