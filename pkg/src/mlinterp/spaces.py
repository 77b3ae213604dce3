"""Finite measure spaces, subsets and simple functions.

Every object here is immutable after construction.  Weights are point
masses; subsets are index sets; a function on a finite space is a vector
of complex values, one per point.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySpace, InvalidSubset, NonpositiveWeight, SpaceMismatch

__all__ = [
    "MeasureSpace",
    "SubsetWitness",
    "SimpleFunction",
    "make_space",
    "measure_of",
    "subset",
    "indicator",
    "function",
]

EXHAUSTIVE_CAP = 16


@dataclass(frozen=True)
class MeasureSpace:
    weights: tuple[float, ...]
    id: str = ""
    total: float = field(init=False, compare=False)

    def __post_init__(self):
        w = tuple(float(x) for x in self.weights)
        if not w:
            raise EmptySpace("a measure space needs at least one point")
        for x in w:
            if not (math.isfinite(x) and x > 0):
                raise NonpositiveWeight(f"weight {x!r} is not a positive finite number")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "total", math.fsum(w))

    @property
    def size(self) -> int:
        return len(self.weights)

    def weight_array(self) -> np.ndarray:
        a = np.array(self.weights, dtype=float)
        a.flags.writeable = False
        return a

    def to_json(self) -> dict:
        return {"id": self.id, "weights": list(self.weights)}

    @classmethod
    def from_json(cls, obj: dict) -> "MeasureSpace":
        return make_space(obj["weights"], id=str(obj.get("id", "")))


def make_space(weights: Iterable[float], id: str = "") -> MeasureSpace:
    """Build a space from point masses; raises on empty or non-positive input."""
    return MeasureSpace(tuple(weights), id=id)


@dataclass(frozen=True)
class SubsetWitness:
    space: MeasureSpace
    members: frozenset[int]

    def __post_init__(self):
        members = frozenset(int(i) for i in self.members)
        bad = [i for i in members if not 0 <= i < self.space.size]
        if bad:
            raise InvalidSubset(f"indices {sorted(bad)} out of range for a {self.space.size}-point space")
        object.__setattr__(self, "members", members)

    @property
    def mask(self) -> int:
        return sum(1 << i for i in self.members)

    def sorted_members(self) -> list[int]:
        return sorted(self.members)

    def __len__(self) -> int:
        return len(self.members)


def subset(space: MeasureSpace, members: Iterable[int]) -> SubsetWitness:
    return SubsetWitness(space, frozenset(members))


def subset_from_mask(space: MeasureSpace, mask: int) -> SubsetWitness:
    return SubsetWitness(space, frozenset(i for i in range(space.size) if mask >> i & 1))


def measure_of(space: MeasureSpace, E: SubsetWitness) -> float:
    if E.space != space:
        raise SpaceMismatch("subset belongs to a different space")
    return math.fsum(space.weights[i] for i in sorted(E.members))


@dataclass(frozen=True, eq=False)
class SimpleFunction:
    space: MeasureSpace
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=complex).reshape(-1)
        if v.shape[0] != self.space.size:
            raise SpaceMismatch(
                f"{v.shape[0]} values for a {self.space.size}-point space"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("function values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __mul__(self, c) -> "SimpleFunction":
        return SimpleFunction(self.space, self.values * complex(c))

    __rmul__ = __mul__

    def abs(self) -> np.ndarray:
        return np.abs(self.values)


def function(space: MeasureSpace, values: Sequence[complex]) -> SimpleFunction:
    return SimpleFunction(space, np.asarray(values, dtype=complex))


def indicator(E: SubsetWitness) -> SimpleFunction:
    v = np.zeros(E.space.size, dtype=complex)
    v[list(E.members)] = 1.0
    return SimpleFunction(E.space, v)
