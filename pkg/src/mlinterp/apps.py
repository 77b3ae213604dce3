"""Desk-scale instances of the three applications.

All grids are one-dimensional, periodic where geometry matters, with unit
point masses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigInvalid, GeometryMissing, GridTooSmall
from .forms import Kernel, adjoint_apply
from .spaces import SimpleFunction, make_space

__all__ = [
    "CZConfig",
    "BHTConfig",
    "CZCheck",
    "make_wolff_pair",
    "make_cz_kernel",
    "check_cz_bounds",
    "cz_distance_sum",
    "make_bht_form",
    "bht_adjoint_identity_residual",
]


def _unit_space(n: int, name: str):
    return make_space([1.0] * n, id=name)


def make_wolff_pair(n: int) -> Kernel:
    """Truncated Hilbert-type kernel K(x, y) = 1/(y - x) for 0 < |x - y| <= n/2."""
    if n < 2:
        raise GridTooSmall(f"need at least 2 points, got {n}")
    x = np.arange(n)
    diff = x[None, :] - x[:, None]
    vals = np.zeros((n, n))
    keep = (diff != 0) & (np.abs(diff) <= n / 2)
    vals[keep] = 1.0 / diff[keep]
    s = _unit_space(n, f"grid{n}")
    return Kernel((s, s), vals)


@dataclass(frozen=True)
class CZConfig:
    m: int
    S: int
    c_size: float = 1.0
    c_grad: float = 8.0
    eps_trunc: float = 1.0

    def __post_init__(self):
        if self.m < 1:
            raise ConfigInvalid("arity m must be at least 1")
        if self.S < 2:
            raise ConfigInvalid("grid side S must be at least 2")
        for name in ("c_size", "c_grad", "eps_trunc"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigInvalid(f"{name} must be positive, got {v!r}")

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.S,) * (self.m + 1)


def cz_distance_sum(cfg: CZConfig) -> np.ndarray:
    """sum over ordered pairs (j, k) of the periodic distance |x_k - x_j|."""
    S, d = cfg.S, cfg.m + 1
    grids = np.indices(cfg.dims)
    D = np.zeros(cfg.dims)
    for j in range(d):
        for k in range(d):
            if j != k:
                gap = np.abs(grids[j] - grids[k])
                D += np.minimum(gap, S - gap)
    return D


def _neighbour_pairs(cfg: CZConfig, outside: np.ndarray):
    """For each axis, the grid points whose forward neighbour (periodic) is
    also outside the truncation region."""
    for axis in range(cfg.m + 1):
        yield axis, outside & np.roll(outside, -1, axis=axis)


def _grad_bound(cfg: CZConfig, D: np.ndarray, axis: int) -> np.ndarray:
    Dn = np.roll(D, -1, axis=axis)
    lo = np.minimum(D, Dn)
    with np.errstate(divide="ignore"):
        return cfg.c_grad * np.where(lo > 0, lo, np.inf) ** (-(cfg.m + 1))


def make_cz_kernel(cfg: CZConfig, seed: int = 0) -> Kernel:
    """Random kernel r(x) * D(x)^-m outside the truncation radius, zero inside.

    r = a + t * phi with a constant and |phi| <= 1 random; |a| is capped so the
    constant part meets the difference bound with room to spare, and the
    amplitude t of the random part is clipped to the largest value keeping
    every one-step difference within bound.
    """
    if not isinstance(cfg, CZConfig):
        raise ConfigInvalid("expected a CZConfig")
    rng = np.random.default_rng(seed)
    m = cfg.m
    D = cz_distance_sum(cfg)
    outside = D >= cfg.eps_trunc
    base = np.zeros(cfg.dims)
    base[outside] = D[outside] ** (-m)
    a = rng.uniform(0.5, 1.0) * min(cfg.c_size / 2, cfg.c_grad / (4 * m * m)) \
        * np.exp(2j * np.pi * rng.uniform())
    phi = np.sqrt(rng.uniform(size=cfg.dims)) * np.exp(2j * np.pi * rng.uniform(size=cfg.dims))
    t = cfg.c_size / 2
    for axis, pair in _neighbour_pairs(cfg, outside):
        bound = 0.999 * _grad_bound(cfg, D, axis)
        d0 = np.abs(a * (base - np.roll(base, -1, axis=axis)))
        d1 = np.abs(phi * base - np.roll(phi * base, -1, axis=axis))
        room = (bound - d0)[pair]
        slope = d1[pair]
        live = slope > 0
        if np.any(live):
            t = min(t, float(np.min(room[live] / slope[live])))
    t = max(t, 0.0)
    vals = np.where(outside, (a + t * phi) * base, 0.0)
    s = _unit_space(cfg.S, f"torus{cfg.S}")
    return Kernel((s,) * (m + 1), vals)


@dataclass(frozen=True)
class CZCheck:
    ok: bool
    kind: str | None = None
    index: tuple[int, ...] | None = None
    axis: int | None = None

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"ok": self.ok, "kind": self.kind,
                "index": None if self.index is None else list(self.index), "axis": self.axis}


def check_cz_bounds(k: Kernel, cfg: CZConfig, rtol: float = 1e-12) -> CZCheck:
    """Size bound |K| <= C_size D^-m and one-step difference bound
    |K(x) - K(x + e_i)| <= C_grad min(D(x), D(x + e_i))^-(m+1), both checked
    only outside the truncation radius.  Size violations are reported before
    difference violations; within each kind the first in row-major order."""
    if k.dims != cfg.dims:
        raise GeometryMissing(f"kernel of shape {k.dims} does not sit on the grid {cfg.dims}")
    D = cz_distance_sum(cfg)
    outside = D >= cfg.eps_trunc
    K = k.values
    size_bound = np.zeros(cfg.dims)
    size_bound[outside] = cfg.c_size * D[outside] ** (-cfg.m)
    bad = outside & (np.abs(K) > size_bound * (1 + rtol))
    if bad.any():
        idx = np.unravel_index(int(np.argmax(bad.reshape(-1))), cfg.dims)
        return CZCheck(False, "size", tuple(int(i) for i in idx))
    first = None
    for axis, pair in _neighbour_pairs(cfg, outside):
        diff = np.abs(K - np.roll(K, -1, axis=axis))
        bad = pair & (diff > _grad_bound(cfg, D, axis) * (1 + rtol))
        if bad.any():
            flat = int(np.argmax(bad.reshape(-1)))
            if first is None or flat < first[0]:
                first = (flat, axis)
    if first is not None:
        idx = np.unravel_index(first[0], cfg.dims)
        return CZCheck(False, "gradient", tuple(int(i) for i in idx), first[1])
    return CZCheck(True)


@dataclass(frozen=True)
class BHTConfig:
    N: int
    alpha: int
    beta: int
    eps: int = 1
    T: int = 1

    def __post_init__(self):
        N = self.N
        if N < 3:
            raise ConfigInvalid("cyclic group too small")
        a, b = self.alpha % N, self.beta % N
        if a == 0 or b == 0:
            raise ConfigInvalid("alpha and beta must be nonzero mod N")
        if a == b:
            raise ConfigInvalid("alpha and beta must be distinct mod N")
        if not (1 <= self.eps <= self.T and 2 * self.T < N):
            raise ConfigInvalid("need 1 <= eps <= T < N/2")

    def ts(self) -> list[int]:
        pos = list(range(self.eps, self.T + 1))
        return [-t for t in reversed(pos)] + pos


def make_bht_form(cfg: BHTConfig) -> Kernel:
    """K(x0, x1, x2) = sum over eps <= |t| <= T of (1/t) [x1 = x0 - alpha t][x2 = x0 - beta t] mod N."""
    N = cfg.N
    vals = np.zeros((N, N, N))
    x0 = np.arange(N)
    for t in cfg.ts():
        np.add.at(vals, (x0, (x0 - cfg.alpha * t) % N, (x0 - cfg.beta * t) % N), 1.0 / t)
    s = _unit_space(N, f"Z{N}")
    return Kernel((s, s, s), vals)


def bht_adjoint_identity_residual(cfg: BHTConfig) -> float:
    """Max deviation of T^{*1} from H_{-alpha, beta-alpha} and of T^{*2} from
    H_{alpha-beta, -beta}, compared on every pair of point masses."""
    N = cfg.N
    k = make_bht_form(cfg)
    k1 = make_bht_form(BHTConfig(N, -cfg.alpha, cfg.beta - cfg.alpha, cfg.eps, cfg.T)).values
    k2 = make_bht_form(BHTConfig(N, cfg.alpha - cfg.beta, -cfg.beta, cfg.eps, cfg.T)).values
    s = k.spaces[0]
    delta = [SimpleFunction(s, np.eye(N)[a]) for a in range(N)]
    worst = 0.0
    for a in range(N):
        for b in range(N):
            # T^{*1}(f_0, f_2) and T^{*2}(f_1, f_0): both compared with H'(delta_a, delta_b)
            g1 = adjoint_apply(k, 1, [delta[a], delta[b]]).values
            g2 = adjoint_apply(k, 2, [delta[a], delta[b]]).values
            worst = max(worst, float(np.max(np.abs(g1 - k1[:, a, b]))),
                        float(np.max(np.abs(g2 - k2[:, a, b]))))
    return worst
