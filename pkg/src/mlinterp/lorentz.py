"""Lorentz functionals on finite measure spaces.

Exponents are plain floats with ``math.inf`` standing for infinity.  The
conjugate exponent follows the Hardy-Littlewood-Polya convention
``1/p' = 1 - 1/p`` for every ``p > 0``, so ``p < 1`` has a negative conjugate.
"""
from __future__ import annotations

import math

import numpy as np

from .errors import ExponentOutOfRange, SpaceTooLarge
from .spaces import SimpleFunction

__all__ = [
    "dual_exponent",
    "lp_norm",
    "weak_norm",
    "lorentz1_rearrangement",
    "lorentz1_dual",
    "lorentz1_dual_extremal",
    "weak_norms_batch",
]

# subset DP in lorentz1_dual is 2^n * n
DUAL_DP_CAP = 20


def _check_positive(p: float) -> float:
    p = float(p)
    if not p > 0:
        raise ExponentOutOfRange(f"exponent must be positive, got {p!r}")
    return p


def dual_exponent(p: float) -> float:
    p = _check_positive(p)
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return 1.0 / (1.0 - 1.0 / p)


def lp_norm(f: SimpleFunction, p: float) -> float:
    p = _check_positive(p)
    a = np.abs(f.values)
    if math.isinf(p):
        return float(a.max())
    w = f.space.weights
    return math.fsum(float(x) ** p * wi for x, wi in zip(a, w) if x) ** (1.0 / p)


def _levels(f: SimpleFunction):
    """Distinct nonzero values of |f| in decreasing order, with the measure
    of each closed superlevel set ``{|f| >= value}``."""
    a = np.abs(f.values)
    w = f.space.weights
    vals = sorted({float(x) for x in a if x > 0}, reverse=True)
    if not vals:
        return np.zeros(0), np.zeros(0)
    pos = {v: k for k, v in enumerate(vals)}
    blocks: list[list[float]] = [[] for _ in vals]
    for x, wi in zip(a, w):
        if x > 0:
            blocks[pos[float(x)]].append(wi)
    cum = np.cumsum([math.fsum(b) for b in blocks])
    return np.array(vals), cum


def weak_norm(f: SimpleFunction, p: float) -> float:
    """sup over lambda of lambda * mu(|f| >= lambda)^(1/p).

    On a finite space the supremum is attained at one of the distinct
    nonzero values of |f|, so only those are swept.
    """
    p = _check_positive(p)
    if math.isinf(p):
        return lp_norm(f, math.inf)
    vals, cum = _levels(f)
    if vals.size == 0:
        return 0.0
    e = 1.0 / p
    return max(float(v) * float(c) ** e for v, c in zip(vals, cum))


def weak_norms_batch(F: np.ndarray, weights: np.ndarray, p: float) -> np.ndarray:
    """Weak norms of many functions at once, one per row of ``F`` (last axis
    indexes points).  Ties need no special handling: for a run of equal
    values the last prefix carries the full closed-level measure and the
    earlier prefixes are dominated by it."""
    a = np.abs(F)
    if math.isinf(p):
        return a.max(axis=-1)
    order = np.argsort(-a, axis=-1, kind="stable")
    a_sorted = np.take_along_axis(a, order, axis=-1)
    cum = np.cumsum(np.asarray(weights, dtype=float)[order], axis=-1)
    return (a_sorted * cum ** (1.0 / p)).max(axis=-1)


def lorentz1_rearrangement(f: SimpleFunction, p: float) -> float:
    """Layer-cake form: integral over lambda of mu(|f| > lambda)^(1/p)."""
    p = _check_positive(p)
    if p < 1 or math.isinf(p):
        raise ExponentOutOfRange(f"L^(p,1) needs 1 <= p < inf, got {p!r}")
    if p == 1:
        return lp_norm(f, 1.0)
    vals, cum = _levels(f)
    if vals.size == 0:
        return 0.0
    gaps = vals - np.append(vals[1:], 0.0)
    e = 1.0 / p
    return math.fsum(float(g) * float(c) ** e for g, c in zip(gaps, cum))


def _best_order(c: np.ndarray, w: np.ndarray, r: float) -> list[int]:
    """Ordering of the points maximising sum_k c[k] * t_k^(-r), where t_k is
    the cumulative weight up to and including the k-th point."""
    n = len(c)
    if n == 0:
        return []
    if np.all(w == w[0]):
        # t_k does not depend on the order; pair large c with large t^-r
        return [int(i) for i in np.argsort(-c, kind="stable")]
    if n > DUAL_DP_CAP:
        raise SpaceTooLarge(f"exact L^(p,1) dual norm with unequal weights is capped at {DUAL_DP_CAP} points")
    size = 1 << n
    masks = np.arange(size)
    bits = (masks[:, None] >> np.arange(n)) & 1
    meas = bits @ w
    with np.errstate(divide="ignore"):
        gain = np.where(meas > 0, meas, 1.0) ** (-r)
    best = np.full(size, -np.inf)
    best[0] = 0.0
    last = np.full(size, -1, dtype=np.int64)
    popcount = bits.sum(axis=1)
    for layer in range(1, n + 1):
        S = masks[popcount == layer]
        for k in range(n):
            has = S[(S >> k) & 1 == 1]
            cand = best[has ^ (1 << k)] + c[k] * gain[has]
            better = cand > best[has]
            best[has[better]] = cand[better]
            last[has[better]] = k
    order = []
    S = size - 1
    while S:
        k = int(last[S])
        order.append(k)
        S ^= 1 << k
    return order[::-1]


def lorentz1_dual_extremal(f: SimpleFunction, p: float) -> tuple[float, SimpleFunction]:
    """Value of the duality-defined L^(p,1) norm together with an extremal g
    in the unit ball of L^(p',inf).

    The supremum is attained by g with ``|g| = t_k^(-1/p')`` along some
    ordering of the support of f (t_k the cumulative weight) and phase
    conjugate to f.  Splitting a level of g never lowers the pairing, so
    strict orderings suffice; the best one is found exactly.
    """
    p = _check_positive(p)
    if not 1 < p < math.inf:
        raise ExponentOutOfRange(f"dual L^(p,1) needs 1 < p < inf, got {p!r}")
    r = 1.0 - 1.0 / p
    a = np.abs(f.values)
    support = np.flatnonzero(a > 0)
    w_all = np.asarray(f.space.weights)
    g = np.zeros(f.space.size, dtype=complex)
    if support.size == 0:
        return 0.0, SimpleFunction(f.space, g)
    c = a[support] * w_all[support]
    w = w_all[support]
    order = _best_order(c, w, r)
    t = np.cumsum(w[order])
    idx = support[order]
    phase = np.conj(f.values[idx]) / a[idx]
    g[idx] = t ** (-r) * phase
    value = math.fsum(c[order] * t ** (-r))
    return value, SimpleFunction(f.space, g)


def lorentz1_dual(f: SimpleFunction, p: float) -> float:
    """sup |sum f g mu| over g with weak_norm(g, p') <= 1."""
    return lorentz1_dual_extremal(f, p)[0]
