"""Restricted weak-type and strong-type constants of a concrete form.

Restricted weak-type constants are taken over characteristic functions with
right-hand side ``prod mu(E_i)^alpha_i``:

* good tuple: ``|Lambda(chi_E0, ..., chi_Em)| / prod_i mu(E_i)^alpha_i``;
* bad tuple with bad index j: ``||T^{*j}(chi's)||_{L^{1/(1-alpha_j), inf}}``
  divided by ``prod_{i != j} mu(E_i)^alpha_i``.

Exhaustive mode enumerates every non-empty subset of every slot as a bitmask
(mask ``s`` contains point ``x`` iff bit ``x`` is set) and returns the exact
supremum; ties go to the lexicographically smallest tuple of masks.  For a
bad tuple the set in slot j does not enter the quotient and the witness
reports ``{0}`` there.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence, Union

import numpy as np

from .errors import EmptySet, NotGoodTuple, SpaceMismatch, SpaceTooLarge
from .exponents import ExponentTuple
from .forms import Kernel, adjoint_apply, adjoint_args, evaluate_form
from .lorentz import lp_norm, weak_norm, weak_norms_batch
from .spaces import (
    EXHAUSTIVE_CAP,
    MeasureSpace,
    SimpleFunction,
    SubsetWitness,
    indicator,
    measure_of,
    subset_from_mask,
)

__all__ = [
    "EstimateClaim",
    "Exhaustive",
    "RandomSearch",
    "AscentConfig",
    "char_quotient",
    "restricted_weak_constant",
    "strong_type_lower",
]

# cap on elements per exhaustive chunk; depends on shapes only, never on threads
CHUNK_ELEMENTS = 1 << 18


@dataclass(frozen=True)
class Exhaustive:
    pass


@dataclass(frozen=True)
class RandomSearch:
    seed: int = 0
    iters: int = 200
    restarts: int = 32


Mode = Union[Exhaustive, RandomSearch]


@dataclass(frozen=True, eq=False)
class EstimateClaim:
    tuple: ExponentTuple
    bound: float
    provenance: str = "user"
    witness: tuple | None = None
    history: tuple[float, ...] = field(default=())

    def __post_init__(self):
        if not self.bound >= 0:
            raise ValueError(f"bound must be non-negative, got {self.bound!r}")

    def to_json(self) -> dict:
        out = {
            "alpha": list(self.tuple.entries),
            "bound": self.bound,
            "provenance": self.provenance,
            "witness": None,
        }
        if self.witness is not None:
            if all(isinstance(w, SubsetWitness) for w in self.witness):
                out["witness"] = [w.sorted_members() for w in self.witness]
            else:
                out["witness_functions"] = [
                    {"re": f.values.real.tolist(), "im": f.values.imag.tolist()}
                    for f in self.witness
                ]
        if self.history:
            out["history"] = list(self.history)
        return out


def _check_arity(k: Kernel, t: ExponentTuple):
    if len(t) != k.arity + 1:
        raise SpaceMismatch(f"tuple of length {len(t)} for a kernel of arity {k.arity}")


def char_quotient(k: Kernel, t: ExponentTuple, Es: Sequence[SubsetWitness]) -> float:
    """The characteristic-function quotient at one tuple of sets."""
    _check_arity(k, t)
    if len(Es) != k.arity + 1:
        raise SpaceMismatch(f"expected {k.arity + 1} sets, got {len(Es)}")
    for i, E in enumerate(Es):
        if E.space != k.spaces[i]:
            raise SpaceMismatch(f"set {i} lives on a different space")
        if not E.members:
            raise EmptySet(f"set {i} is empty")
    mus = [measure_of(k.spaces[i], E) for i, E in enumerate(Es)]
    chis = [indicator(E) for E in Es]
    if t.is_good:
        den = math.prod(mu ** a for mu, a in zip(mus, t))
        return abs(evaluate_form(k, chis)) / den
    j = t.bad_index
    F = adjoint_apply(k, j, adjoint_args(chis, j))
    den = math.prod(mus[i] ** t[i] for i in range(len(t)) if i != j)
    return weak_norm(F, 1.0 / (1.0 - t[j])) / den


@lru_cache(maxsize=256)
def _subset_tables(weights: tuple[float, ...]):
    """Weighted indicator rows and exact measures for masks 1 .. 2^n - 1."""
    n = len(weights)
    masks = np.arange(1, 1 << n)
    bits = ((masks[:, None] >> np.arange(n)) & 1).astype(float)
    M = bits * np.asarray(weights)
    meas = np.array([math.fsum(row) for row in M])
    M.flags.writeable = False
    meas.flags.writeable = False
    return M, meas


def _contract(X: np.ndarray, axis: int, M: np.ndarray) -> np.ndarray:
    """Replace axis ``axis`` of X (length n) by the subset axis of M (S x n)."""
    letters = "abcdefghijklmnopqr"
    d = X.ndim
    src = letters[:d]
    dst = src[:axis] + "z" + src[axis + 1:]
    return np.einsum(f"{src},z{src[axis]}->{dst}", X, M)


def _denominator(meas: Sequence[np.ndarray], alphas: Sequence[float]) -> np.ndarray:
    out = np.ones(())
    for mu, a in zip(meas, alphas):
        out = np.multiply.outer(out, mu ** a)
    return out


def _chunk_job(k: Kernel, t: ExponentTuple, lead: int, tables, rows: slice):
    """Quotients for one block of subsets of the lead slot; returns the local
    best value and its flat index within the block."""
    m = k.arity
    j = None if t.is_good else t.bad_index
    X = k.values
    for i in range(m + 1):
        if i == j:
            continue
        M = tables[i][0]
        if i == lead:
            M = M[rows]
        X = _contract(X, i, M)
    meas = [tables[i][1][rows] if i == lead else tables[i][1] for i in range(m + 1)]
    if j is None:
        q = np.abs(X) / _denominator(meas, t.entries)
    else:
        X = np.moveaxis(X, j, -1)
        w = k.spaces[j].weight_array()
        weak = weak_norms_batch(X, w, 1.0 / (1.0 - t[j]))
        others = [i for i in range(m + 1) if i != j]
        q = weak / _denominator([meas[i] for i in others], [t[i] for i in others])
    flat = q.reshape(-1)
    idx = int(np.argmax(flat))
    return float(flat[idx]), idx, q.shape


def _exhaustive(k: Kernel, t: ExponentTuple, threads: int) -> EstimateClaim:
    for s in k.spaces:
        if s.size > EXHAUSTIVE_CAP:
            raise SpaceTooLarge(f"exhaustive search is capped at {EXHAUSTIVE_CAP} points per space")
    m = k.arity
    j = None if t.is_good else t.bad_index
    tables = [_subset_tables(s.weights) for s in k.spaces]
    active = [i for i in range(m + 1) if i != j]
    lead = active[0]
    S_lead = tables[lead][1].size
    rest = math.prod(tables[i][1].size for i in active[1:])
    step = max(1, CHUNK_ELEMENTS // max(rest, 1))
    chunks = [slice(a, min(a + step, S_lead)) for a in range(0, S_lead, step)]

    def job(rows):
        return _chunk_job(k, t, lead, tables, rows)

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, chunks))
    else:
        results = [job(c) for c in chunks]

    best, where = -1.0, None
    for c, (val, idx, shape) in zip(chunks, results):
        if val > best:
            best, where = val, (c, idx, shape)
    c, idx, shape = where
    pos = list(np.unravel_index(idx, shape))
    # the subset axes of the active slots, in slot order
    masks = [1] * (m + 1)
    for i, p in zip(active, pos):
        masks[i] = int(p) + 1 + (c.start if i == lead else 0)
    witness = tuple(subset_from_mask(k.spaces[i], masks[i]) for i in range(m + 1))
    return EstimateClaim(t, best, "exhaustive", witness)


def _random_subset(rng: np.random.Generator, n: int) -> frozenset[int]:
    pick = rng.random(n) < 0.5
    if not pick.any():
        pick[rng.integers(n)] = True
    return frozenset(np.flatnonzero(pick).tolist())


def _climb(k: Kernel, t: ExponentTuple, rng: np.random.Generator, iters: int):
    m = k.arity
    j = None if t.is_good else t.bad_index
    sets = []
    for i, s in enumerate(k.spaces):
        sets.append(frozenset([0]) if i == j else _random_subset(rng, s.size))

    def value(ss):
        return char_quotient(k, t, [SubsetWitness(k.spaces[i], e) for i, e in enumerate(ss)])

    cur = value(sets)
    for _ in range(iters):
        best_val, best_sets = cur, None
        for i in range(m + 1):
            if i == j:
                continue
            for x in range(k.spaces[i].size):
                e = sets[i] ^ {x}
                if not e:
                    continue
                cand = sets[:i] + [e] + sets[i + 1:]
                v = value(cand)
                if v > best_val:
                    best_val, best_sets = v, cand
        if best_sets is None:
            break
        cur, sets = best_val, best_sets
    return cur, sets


def _random_search(k: Kernel, t: ExponentTuple, mode: RandomSearch, threads: int) -> EstimateClaim:
    streams = np.random.SeedSequence(mode.seed).spawn(mode.restarts)

    def job(ss):
        return _climb(k, t, np.random.default_rng(ss), mode.iters)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(job, streams))
    else:
        results = [job(s) for s in streams]
    best_val, best_sets = -1.0, None
    for val, sets in results:
        if val > best_val:
            best_val, best_sets = val, sets
    witness = tuple(SubsetWitness(k.spaces[i], e) for i, e in enumerate(best_sets))
    return EstimateClaim(t, best_val, "search", witness)


def restricted_weak_constant(k: Kernel, t: ExponentTuple, mode: Mode = Exhaustive(),
                             threads: int = 1) -> EstimateClaim:
    """Best characteristic-function constant at ``t``: exact in exhaustive
    mode, a seeded lower bound in random-search mode."""
    _check_arity(k, t)
    if isinstance(mode, Exhaustive):
        return _exhaustive(k, t, threads)
    return _random_search(k, t, mode, threads)


@dataclass(frozen=True)
class AscentConfig:
    max_iter: int = 500
    tol: float = 1e-12
    seed: int = 0
    restarts: int = 4


def _extremal_for(G: np.ndarray, p: float) -> np.ndarray:
    """f maximising |sum f G mu| / ||f||_p (before normalisation): phase
    conjugate to G with modulus |G|^(p'-1)."""
    q = 1.0 / (1.0 - 1.0 / p)
    a = np.abs(G)
    out = np.zeros_like(G)
    nz = a > 0
    out[nz] = np.conj(G[nz]) * a[nz] ** (q - 2.0)
    return out


def _normalise(f: SimpleFunction, p: float) -> SimpleFunction:
    nrm = lp_norm(f, p)
    return f if nrm == 0 else f * (1.0 / nrm)


def _ascend(k: Kernel, t: ExponentTuple, fs: list[SimpleFunction], cfg: AscentConfig):
    m = k.arity
    ps = [1.0 / a for a in t]
    fs = [_normalise(f, p) for f, p in zip(fs, ps)]
    history = [abs(evaluate_form(k, fs))]
    for _ in range(cfg.max_iter):
        for i in range(m + 1):
            G = adjoint_apply(k, i, adjoint_args(fs, i)).values
            f_new = SimpleFunction(k.spaces[i], _extremal_for(G, ps[i]))
            if lp_norm(f_new, ps[i]) == 0:
                continue
            fs[i] = _normalise(f_new, ps[i])
        val = abs(evaluate_form(k, fs))
        prev = history[-1]
        history.append(val)
        if val <= prev * (1.0 + cfg.tol):
            break
    return history, fs


def strong_type_lower(k: Kernel, t: ExponentTuple, config: AscentConfig = AscentConfig(),
                      initial: Sequence[SimpleFunction] | None = None) -> EstimateClaim:
    """Lower bound for the strong-type constant at a good tuple by alternating
    maximisation over the slots.  The objective is |Lambda| / prod ||f_i||
    with ``||f_i||`` the L^{1/alpha_i} norm; it never decreases along a run.
    ``initial`` (optional) seeds an extra first run."""
    _check_arity(k, t)
    if not t.is_good:
        raise NotGoodTuple(f"{t.entries} is not a good tuple")
    starts = []
    if initial is not None:
        starts.append(list(initial))
    for ss in np.random.SeedSequence(config.seed).spawn(config.restarts):
        rng = np.random.default_rng(ss)
        starts.append([
            SimpleFunction(s, rng.standard_normal(s.size) + 1j * rng.standard_normal(s.size))
            for s in k.spaces
        ])
    best = None
    for fs in starts:
        history, out = _ascend(k, t, fs, config)
        if best is None or history[-1] > best[0][-1]:
            best = (history, out)
    history, fs = best
    return EstimateClaim(t, history[-1], "search", tuple(fs), tuple(history))
