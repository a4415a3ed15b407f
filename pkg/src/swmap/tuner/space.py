"""Discrete search spaces, configurations and selection algorithms."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Mapping, Sequence

from .sobol import sobol_point

SKIP_LIMIT = 4096


class SpaceExhausted(Exception):
    """Every configuration of the space has been measured."""


@dataclass(frozen=True)
class Configuration:
    items: tuple[tuple[str, Any], ...]

    @classmethod
    def of(cls, values: Mapping[str, Any]) -> "Configuration":
        return cls(tuple(values.items()))

    def __getitem__(self, name: str):
        for k, v in self.items:
            if k == name:
                return v
        raise KeyError(name)

    def as_dict(self) -> dict:
        return dict(self.items)

    def values(self) -> tuple:
        return tuple(v for _, v in self.items)

    def __str__(self):
        return ", ".join(f"{k}={v}" for k, v in self.items)


class SearchSpaceDef:
    def __init__(self, parameters: Sequence[tuple[str, Sequence[Any]]]):
        names = [n for n, _ in parameters]
        if len(set(names)) != len(names):
            raise ValueError("parameter names must be unique")
        for name, values in parameters:
            if not values:
                raise ValueError(f"parameter {name!r} has no values")
        self.parameters: tuple[tuple[str, tuple], ...] = tuple((n, tuple(v)) for n, v in parameters)
        self.names = tuple(names)
        self.lengths = tuple(len(v) for _, v in self.parameters)
        self._rank = [{v: k for k, v in enumerate(vals)} for _, vals in self.parameters]

    @classmethod
    def from_mapping(cls, params: Mapping[str, Sequence[Any]]) -> "SearchSpaceDef":
        return cls(list(params.items()))

    @property
    def size(self) -> int:
        return math.prod(self.lengths)

    @property
    def dim(self) -> int:
        return len(self.parameters)

    def config(self, indices: Sequence[int]) -> Configuration:
        return Configuration(tuple((n, vals[i]) for (n, vals), i in zip(self.parameters, indices)))

    def indices(self, config: Configuration) -> tuple[int, ...]:
        try:
            return tuple(rank[config[name]] for rank, name in zip(self._rank, self.names))
        except KeyError as exc:
            raise ValueError(f"{config} is not in the search space") from exc

    def contains(self, config: Configuration) -> bool:
        if tuple(k for k, _ in config.items) != self.names:
            return False
        return all(v in rank for rank, v in zip(self._rank, config.values()))

    def flat(self, indices: Sequence[int]) -> int:
        k = 0
        for i, n in zip(indices, self.lengths):
            k = k * n + i
        return k

    def unflat(self, k: int) -> tuple[int, ...]:
        out = []
        for n in reversed(self.lengths):
            k, i = divmod(k, n)
            out.append(i)
        return tuple(reversed(out))

    def all_indices(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(n) for n in self.lengths))

    def all_configs(self) -> Iterator[Configuration]:
        return (self.config(ix) for ix in self.all_indices())


def _first_unmeasured(space: SearchSpaceDef, measured: set) -> tuple[int, ...]:
    for ix in space.all_indices():
        if ix not in measured:
            return ix
    raise SpaceExhausted


def sobol_next(space: SearchSpaceDef, index: int, measured: Iterable[tuple[int, ...]] = ()) -> tuple[Configuration, int]:
    """Configuration for Sobol point ``index`` (>= 1), skipping measured ones.

    Coordinate ``u`` of dimension ``d`` maps to value rank ``floor(u * n_d)``.
    Returns the configuration and the index of the point that produced it;
    continue from ``index + 1``. After a long run of already-measured points
    the first unmeasured configuration in enumeration order is returned.
    """
    if index < 1:
        raise ValueError("Sobol index starts at 1")
    measured = measured if isinstance(measured, set) else set(measured)
    if len(measured) >= space.size:
        raise SpaceExhausted
    for k in range(index, index + SKIP_LIMIT):
        u = sobol_point(k, space.dim)
        ix = tuple(min(int(x * n), n - 1) for x, n in zip(u, space.lengths))
        if ix not in measured:
            return space.config(ix), k
    return space.config(_first_unmeasured(space, measured)), index + SKIP_LIMIT - 1


def random_next(space: SearchSpaceDef, rng: random.Random, measured: Iterable[tuple[int, ...]] = ()) -> Configuration:
    """Uniformly random unmeasured configuration."""
    measured = measured if isinstance(measured, set) else set(measured)
    if len(measured) >= space.size:
        raise SpaceExhausted
    for _ in range(SKIP_LIMIT):
        ix = tuple(rng.randrange(n) for n in space.lengths)
        if ix not in measured:
            return space.config(ix)
    free = [k for k in range(space.size) if space.unflat(k) not in measured]
    return space.config(space.unflat(rng.choice(free)))
