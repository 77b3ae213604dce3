"""Exponent tuples and the convex geometry of restricted weak-type claims.

A tuple is a point ``(alpha_0, ..., alpha_m)`` on the hyperplane
``sum alpha_i = 1`` with every entry at most 1 and at most one entry
non-positive.  Coordinates are reciprocal exponents ``(1/p_0', 1/p_1, ...)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

from .errors import (
    DegenerateHull,
    EntryAboveOne,
    LengthMismatch,
    SumNotOne,
    TwoNonpositive,
)

__all__ = [
    "ExponentTuple",
    "CombinationWeights",
    "Classification",
    "RegionDescription",
    "validate_tuple",
    "classify",
    "convex_combination",
    "solve_combination",
    "interior_membership",
    "hull_membership_batch",
    "deduce_strong_region",
    "combination_weights",
]

SUM_TOL = 1e-12
DEFAULT_DELTA = 1e-6
# probe feasibility: barycentric slack and LP residual
BARY_TOL = 1e-12
LP_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class ExponentTuple:
    entries: tuple[float, ...]

    def __post_init__(self):
        v = tuple(float(x) for x in self.entries)
        if len(v) < 2:
            raise LengthMismatch("a tuple needs at least two entries")
        if not all(math.isfinite(x) for x in v):
            raise SumNotOne("tuple entries must be finite")
        if abs(math.fsum(v) - 1.0) > SUM_TOL:
            raise SumNotOne(f"entries sum to {math.fsum(v)!r}, not 1")
        if sum(x <= 0 for x in v) > 1:
            raise TwoNonpositive(f"{v} has more than one non-positive entry")
        if any(x > 1 + SUM_TOL for x in v):
            raise EntryAboveOne(f"{v} has an entry above 1")
        object.__setattr__(self, "entries", v)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __iter__(self):
        return iter(self.entries)

    @property
    def m(self) -> int:
        return len(self.entries) - 1

    @property
    def is_good(self) -> bool:
        return all(0 < x < 1 for x in self.entries)

    @property
    def argmin_index(self) -> int:
        """Smallest index attaining the minimum entry (defined for every tuple)."""
        lo = min(self.entries)
        return self.entries.index(lo)

    @property
    def bad_index(self) -> int | None:
        return None if self.is_good else self.argmin_index

    def array(self) -> np.ndarray:
        return np.array(self.entries)


def validate_tuple(v: Iterable[float]) -> ExponentTuple:
    return ExponentTuple(tuple(v))


@dataclass(frozen=True)
class Classification:
    good: bool
    bad_index: int | None = None

    def to_json(self) -> dict:
        if self.good:
            return {"class": "good"}
        return {"class": "bad", "bad_index": self.bad_index}


def classify(t: ExponentTuple) -> Classification:
    if t.is_good:
        return Classification(True)
    return Classification(False, t.argmin_index)


@dataclass(frozen=True)
class CombinationWeights:
    thetas: tuple[float, ...]

    def __post_init__(self):
        th = tuple(float(x) for x in self.thetas)
        if not th:
            raise LengthMismatch("empty weight vector")
        if any(not (-SUM_TOL <= x <= 1 + SUM_TOL) for x in th):
            raise SumNotOne(f"weights {th} are not all in [0, 1]")
        if abs(math.fsum(th) - 1.0) > SUM_TOL:
            raise SumNotOne(f"weights sum to {math.fsum(th)!r}, not 1")
        object.__setattr__(self, "thetas", th)

    def __len__(self):
        return len(self.thetas)

    def __iter__(self):
        return iter(self.thetas)

    def __getitem__(self, i):
        return self.thetas[i]


def combination_weights(thetas: Iterable[float]) -> CombinationWeights:
    return CombinationWeights(tuple(thetas))


def _stack(ts: Sequence[ExponentTuple]) -> np.ndarray:
    if not ts:
        raise LengthMismatch("no tuples given")
    n = len(ts[0])
    if any(len(t) != n for t in ts):
        raise LengthMismatch("tuples of different lengths")
    return np.array([t.entries for t in ts], dtype=float)


def convex_combination(ts: Sequence[ExponentTuple], w: CombinationWeights) -> ExponentTuple:
    V = _stack(ts)
    if len(w) != len(ts):
        raise LengthMismatch(f"{len(ts)} tuples but {len(w)} weights")
    entries = [math.fsum(th * V[s, i] for s, th in enumerate(w)) for i in range(V.shape[1])]
    return validate_tuple(entries)


def _simplex_solver(V: np.ndarray):
    """Inverse of the vertex matrix when the claims are affinely independent
    and span the hyperplane (N = m + 1); barycentric coordinates are then
    unique and no LP is needed."""
    N, d = V.shape
    if N != d:
        return None
    if np.linalg.matrix_rank(V) < d:
        return None
    return np.linalg.inv(V.T)


def _lp_weights(V: np.ndarray, target: np.ndarray) -> np.ndarray | None:
    """Maximise min theta subject to theta in the simplex and V^T theta = target."""
    N, d = V.shape
    c = np.zeros(N + 1)
    c[-1] = -1.0
    A_eq = np.zeros((d + 1, N + 1))
    A_eq[:d, :N] = V.T
    A_eq[d, :N] = 1.0
    b_eq = np.append(target, 1.0)
    A_ub = np.hstack([-np.eye(N), np.ones((N, 1))])
    b_ub = np.zeros(N)
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=[(0, 1)] * (N + 1), method="highs")
    if res.status != 0:
        return None
    th = np.clip(res.x[:N], 0.0, None)
    th = th / th.sum()
    if np.max(np.abs(V.T @ th - target)) > LP_RESIDUAL_TOL:
        return None
    return th


def solve_combination(target: ExponentTuple, ts: Sequence[ExponentTuple]) -> CombinationWeights | None:
    V = _stack(ts)
    if V.shape[1] != len(target):
        raise LengthMismatch("target and claims differ in length")
    x = target.array()
    inv = _simplex_solver(V)
    if inv is not None:
        th = inv @ x
        if th.min() < -BARY_TOL:
            return None
        th = np.clip(th, 0.0, None)
        th = th / th.sum()
    else:
        th = _lp_weights(V, x)
        if th is None:
            return None
    return CombinationWeights(tuple(float(v) for v in th))


def _directions(d: int) -> np.ndarray:
    D = np.zeros((d - 1, d))
    for k in range(d - 1):
        D[k, k] = 1.0
        D[k, k + 1] = -1.0
    return D


def hull_membership_batch(points: np.ndarray, ts: Sequence[ExponentTuple]) -> np.ndarray:
    """Closed-hull membership for each row of ``points`` (rows on the hyperplane)."""
    V = _stack(ts)
    P = np.atleast_2d(np.asarray(points, dtype=float))
    inv = _simplex_solver(V)
    if inv is not None:
        th = P @ inv.T
        return th.min(axis=1) >= -BARY_TOL
    return np.array([_lp_weights(V, p) is not None for p in P], dtype=bool)


def _probes(P: np.ndarray, delta: float) -> np.ndarray:
    D = _directions(P.shape[1])
    steps = np.concatenate([D, -D]) * delta
    return P[:, None, :] + steps[None, :, :]


def interior_membership(target: ExponentTuple, ts: Sequence[ExponentTuple],
                        delta: float = DEFAULT_DELTA) -> bool:
    """True iff ``target`` is in the interior of hull(ts) relative to the
    hyperplane sum x = 1: every probe target +- delta (e_k - e_{k+1}) must
    lie in the hull."""
    return bool(interior_membership_batch(np.array([target.entries]), ts, delta)[0])


def interior_membership_batch(points: np.ndarray, ts: Sequence[ExponentTuple],
                              delta: float = DEFAULT_DELTA) -> np.ndarray:
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.shape[1] != len(ts[0]):
        raise LengthMismatch("points and claims differ in length")
    probes = _probes(P, delta)
    k = probes.shape[1]
    inside = hull_membership_batch(probes.reshape(-1, P.shape[1]), ts)
    return inside.reshape(-1, k).all(axis=1)


def good_lattice(d: int, resolution: int) -> np.ndarray:
    """All good tuples with entries k_i / resolution, k_i >= 1."""
    if resolution < d:
        return np.zeros((0, d))
    rows = []
    # stars and bars: choose d - 1 cut points among resolution - 1 gaps
    for cuts in itertools.combinations(range(1, resolution), d - 1):
        edges = (0,) + cuts + (resolution,)
        rows.append([edges[i + 1] - edges[i] for i in range(d)])
    return np.array(rows, dtype=float) / resolution


def _canonical_facet(a: np.ndarray, b: float) -> tuple[tuple[float, ...], float]:
    # on the hyperplane, (a - c 1).x = a.x - c; pick c = min(a), then scale
    c = a.min()
    a = a - c
    b = b - c
    s = np.abs(a).max()
    return tuple(float(round(x / s, 12)) + 0.0 for x in a), float(round(b / s, 12)) + 0.0


def hull_facets(ts: Sequence[ExponentTuple]) -> list[tuple[tuple[float, ...], float]] | None:
    """Facet inequalities a.x <= b of hull(ts) inside the hyperplane, for m <= 3."""
    V = _stack(ts)
    d = V.shape[1]
    m = d - 1
    if m > 3:
        return None
    Y = V[:, :m]
    raw = []
    if m == 1:
        lo, hi = Y[:, 0].min(), Y[:, 0].max()
        if hi - lo <= SUM_TOL:
            return None
        raw = [(np.array([1.0, 0.0]), hi), (np.array([-1.0, 0.0]), -lo)]
    else:
        try:
            hull = ConvexHull(Y)
        except (QhullError, ValueError):
            return None
        for eq in hull.equations:
            raw.append((np.append(eq[:-1], 0.0), -eq[-1]))
    facets = sorted({_canonical_facet(a, b) for a, b in raw})
    return facets


@dataclass(frozen=True, eq=False)
class RegionDescription:
    claims: tuple[ExponentTuple, ...]
    delta: float
    resolution: int
    facets: list | None
    lattice: np.ndarray
    inside: np.ndarray

    @property
    def samples(self) -> np.ndarray:
        return self.lattice[self.inside]

    def contains(self, t: ExponentTuple | Sequence[float]) -> bool:
        if not isinstance(t, ExponentTuple):
            t = validate_tuple(t)
        return t.is_good and interior_membership(t, self.claims, self.delta)

    def to_json(self) -> dict:
        return {
            "claims": [list(c.entries) for c in self.claims],
            "delta": self.delta,
            "resolution": self.resolution,
            "facets": None if self.facets is None else [
                {"a": list(a), "b": b} for a, b in self.facets
            ],
            "samples": self.samples.tolist(),
        }

    def csv_rows(self) -> list[list]:
        d = self.lattice.shape[1] if self.lattice.size else len(self.claims[0])
        rows = [[f"x{i}" for i in range(d)] + ["inside"]]
        for x, ok in zip(self.lattice, self.inside):
            rows.append([*x.tolist(), int(ok)])
        return rows


def deduce_strong_region(claims: Sequence[ExponentTuple], resolution: int = 12,
                         delta: float = DEFAULT_DELTA) -> RegionDescription:
    """Good tuples in the interior of the hull of the claim tuples, sampled on
    the lattice of good tuples with denominator ``resolution``."""
    claims = tuple(claims)
    if len(claims) < 2:
        raise DegenerateHull("need at least two claims")
    V = _stack(claims)
    if np.ptp(V, axis=0).max() <= SUM_TOL:
        raise DegenerateHull("all claims coincide")
    lattice = good_lattice(V.shape[1], resolution)
    if lattice.size:
        inside = interior_membership_batch(lattice, claims, delta)
    else:
        inside = np.zeros(0, dtype=bool)
    return RegionDescription(claims, delta, resolution, hull_facets(claims), lattice, inside)
