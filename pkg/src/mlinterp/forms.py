"""Kernels, the (m+1)-linear form and its adjoints.

The kernel is a dense complex array whose axis ``i`` indexes the points of
``spaces[i]``; slot 0 is the output variable of ``T``.  Sums are evaluated
with ``math.fsum`` on real and imaginary parts so results are correctly
rounded and independent of evaluation order.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import KernelShapeError, SlotOutOfRange, SpaceMismatch
from .spaces import MeasureSpace, SimpleFunction

__all__ = ["Kernel", "make_kernel", "evaluate_form", "adjoint_apply", "fsum_complex"]


@dataclass(frozen=True, eq=False)
class Kernel:
    spaces: tuple[MeasureSpace, ...]
    values: np.ndarray

    def __post_init__(self):
        spaces = tuple(self.spaces)
        if len(spaces) < 2:
            raise KernelShapeError("a kernel needs arity m >= 1, i.e. at least two spaces")
        v = np.array(self.values, dtype=complex)
        dims = tuple(s.size for s in spaces)
        if v.shape != dims:
            if v.size != math.prod(dims):
                raise KernelShapeError(f"{v.size} values for a grid of shape {dims}")
            v = v.reshape(dims)
        if not np.all(np.isfinite(v)):
            raise KernelShapeError("kernel values must be finite")
        v.flags.writeable = False
        object.__setattr__(self, "spaces", spaces)
        object.__setattr__(self, "values", v)

    @property
    def arity(self) -> int:
        return len(self.spaces) - 1

    @property
    def dims(self) -> tuple[int, ...]:
        return self.values.shape

    def weighted(self) -> np.ndarray:
        """K times the product of all point masses."""
        out = self.values
        for i, s in enumerate(self.spaces):
            shape = [1] * len(self.spaces)
            shape[i] = s.size
            out = out * s.weight_array().reshape(shape)
        return out

    def scaled(self, c: complex) -> "Kernel":
        return Kernel(self.spaces, self.values * complex(c))

    def permuted(self, perm: Sequence[int]) -> "Kernel":
        """New kernel whose slot ``i`` is slot ``perm[i]`` of this one."""
        perm = list(perm)
        return Kernel(tuple(self.spaces[p] for p in perm), np.transpose(self.values, perm))

    def to_json(self) -> dict:
        flat = self.values.reshape(-1)
        return {
            "arity": self.arity,
            "dims": list(self.dims),
            "space_ids": [s.id for s in self.spaces],
            "values_re": [float(x) for x in flat.real],
            "values_im": [float(x) for x in flat.imag],
            "spaces": [s.to_json() for s in self.spaces],
        }


def make_kernel(spaces: Sequence[MeasureSpace], values) -> Kernel:
    return Kernel(tuple(spaces), values)


def fsum_complex(a: np.ndarray) -> complex:
    a = np.asarray(a).reshape(-1)
    return complex(math.fsum(a.real.tolist()), math.fsum(a.imag.tolist()))


def _check_fn(k: Kernel, slot: int, f: SimpleFunction):
    if f.space != k.spaces[slot]:
        raise SpaceMismatch(f"function for slot {slot} lives on a different space")


def _outer_weighted(k: Kernel, slots: Sequence[int], fs: Sequence[SimpleFunction]) -> np.ndarray:
    out = k.values
    for i, f in zip(slots, fs):
        shape = [1] * (k.arity + 1)
        shape[i] = k.dims[i]
        out = out * (f.values * k.spaces[i].weight_array()).reshape(shape)
    return out


def evaluate_form(k: Kernel, fs: Sequence[SimpleFunction]) -> complex:
    """Lambda(f_0, ..., f_m) = sum of K * prod f_i(x_i) mu_i(x_i) over the grid."""
    if len(fs) != k.arity + 1:
        raise SpaceMismatch(f"expected {k.arity + 1} functions, got {len(fs)}")
    for i, f in enumerate(fs):
        _check_fn(k, i, f)
    return fsum_complex(_outer_weighted(k, range(k.arity + 1), fs))


def slot_order(m: int, j: int) -> list[int]:
    """Slots fed by the arguments of T^{*j}, in argument order.

    The arguments are (f_1, ..., f_{j-1}, f_0, f_{j+1}, ..., f_m): slot 0
    takes the place of slot j.
    """
    return [0 if i == j else i for i in range(1, m + 1)]


def adjoint_apply(k: Kernel, j: int, gs: Sequence[SimpleFunction]) -> SimpleFunction:
    """T^{*j} applied to ``gs``; ``j = 0`` is T itself.

    Satisfies sum_x f_j(x) T^{*j}(...)(x) mu_j(x) = Lambda(f_0, ..., f_m).
    """
    m = k.arity
    if not 0 <= j <= m:
        raise SlotOutOfRange(f"slot {j} outside 0..{m}")
    if len(gs) != m:
        raise SpaceMismatch(f"T^*{j} takes {m} functions, got {len(gs)}")
    slots = slot_order(m, j)
    for i, g in zip(slots, gs):
        _check_fn(k, i, g)
    prod = np.moveaxis(_outer_weighted(k, slots, gs), j, 0).reshape(k.dims[j], -1)
    out = np.array([fsum_complex(row) for row in prod], dtype=complex)
    return SimpleFunction(k.spaces[j], out)


def adjoint_args(fs: Sequence[SimpleFunction], j: int) -> list[SimpleFunction]:
    """Arrange a full list (f_0, ..., f_m) into the argument list of T^{*j}."""
    return [fs[i] for i in slot_order(len(fs) - 1, j)]
