"""Numerical check of the restricted weak-type interpolation theorem.

All constants use the characteristic-function normalisation of
``constants``: with ``A`` the best constant in

    |Lambda(chi_E0, ..., chi_Em)| <= A * prod_s B_s^theta_s * prod_i mu(E_i)^alpha_i,

the set-splitting argument gives, for every claim ``s`` that may be selected,

    A * (1 - 2^-alpha_j) <= 2^(1 - alpha^(s)_j) + eps,    j = bad index of claim s,

so ``A <= max_s 2^(1 - alpha^(s)_j) / (1 - 2^-alpha_j)`` once eps -> 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .constants import EstimateClaim, Exhaustive, restricted_weak_constant
from .errors import CombinationMismatch, EpsilonTooLarge, LengthMismatch, NotGoodTuple
from .exponents import CombinationWeights, ExponentTuple
from .forms import Kernel, adjoint_apply, adjoint_args, evaluate_form
from .lorentz import weak_norm
from .spaces import SimpleFunction, SubsetWitness, indicator, measure_of

__all__ = [
    "explicit_constant",
    "product_of_bounds",
    "verify_theorem",
    "trace_proof",
    "TheoremReport",
    "ProofTrace",
]

COMBINATION_TOL = 1e-9
PASS_SLACK = 1e-9
REL_TOL = 1e-9


def _split_index(t: ExponentTuple) -> int:
    # bad index for bad tuples; smallest argmin otherwise
    return t.argmin_index


def _check_combination(alpha: ExponentTuple, claims: Sequence[ExponentTuple], w: CombinationWeights):
    if not alpha.is_good:
        raise NotGoodTuple(f"{alpha.entries} is not a good tuple")
    if len(claims) != len(w):
        raise LengthMismatch(f"{len(claims)} claims but {len(w)} weights")
    if any(len(c) != len(alpha) for c in claims):
        raise LengthMismatch("claim tuples and target differ in length")
    for i in range(len(alpha)):
        val = math.fsum(th * c[i] for th, c in zip(w, claims))
        if abs(val - alpha[i]) > COMBINATION_TOL:
            raise CombinationMismatch(
                f"weights give entry {i} = {val!r}, target has {alpha[i]!r}"
            )


def explicit_constant(alpha: ExponentTuple, claims: Sequence[ExponentTuple],
                      w: CombinationWeights) -> float:
    _check_combination(alpha, claims, w)
    terms = []
    for c in claims:
        j = _split_index(c)
        terms.append(2.0 ** (1.0 - c[j]) / (1.0 - 2.0 ** (-alpha[j])))
    return max(terms)


def product_of_bounds(claims: Sequence[EstimateClaim], w: CombinationWeights) -> float:
    return math.prod(c.bound ** th for c, th in zip(claims, w))


@dataclass(frozen=True, eq=False)
class TheoremReport:
    alpha: ExponentTuple
    claims: tuple[EstimateClaim, ...]
    thetas: CombinationWeights
    A: float
    C: float
    product: float
    passed: bool
    witness: tuple[SubsetWitness, ...]

    @property
    def margin(self) -> float:
        return self.C * self.product - self.A

    @property
    def margin_ratio(self) -> float:
        rhs = self.C * self.product
        return self.A / rhs if rhs > 0 else math.nan

    def to_json(self) -> dict:
        return {
            "alpha": list(self.alpha.entries),
            "claims": [c.to_json() for c in self.claims],
            "thetas": list(self.thetas.thetas),
            "A": self.A,
            "C": self.C,
            "product_of_bounds": self.product,
            "pass": self.passed,
            "margin": self.margin,
            "margin_ratio": self.margin_ratio,
            "normalization": "characteristic functions, right side prod mu(E_i)^alpha_i",
            "witness": [w.sorted_members() for w in self.witness],
        }


def verify_theorem(k: Kernel, claims: Sequence[EstimateClaim], w: CombinationWeights,
                   alpha: ExponentTuple, threads: int = 1) -> TheoremReport:
    """Exact best constant at ``alpha`` against C * prod B_s^theta_s."""
    claims = tuple(claims)
    C = explicit_constant(alpha, [c.tuple for c in claims], w)
    best = restricted_weak_constant(k, alpha, Exhaustive(), threads=threads)
    prod = product_of_bounds(claims, w)
    passed = best.bound <= C * prod + PASS_SLACK
    return TheoremReport(alpha, claims, w, best.bound, C, prod, passed, best.witness)


@dataclass(frozen=True)
class Check:
    lhs: float
    rhs: float
    ok: bool

    def to_json(self) -> dict:
        return {"lhs": self.lhs, "rhs": self.rhs, "ok": self.ok}


def _le(lhs: float, rhs: float, rel: float = REL_TOL) -> Check:
    return Check(float(lhs), float(rhs), bool(lhs <= rhs + rel * abs(rhs)))


@dataclass(frozen=True, eq=False)
class ProofTrace:
    epsilon: float
    A: float
    A_raw: float
    Q: float
    Q_factored: float
    products: tuple[float, ...]
    s0: int
    j: int
    F: SimpleFunction
    lambda_threshold: float
    Eprime: SubsetWitness
    halves_ok: bool
    split_low: float
    split_high: float
    sets: tuple[SubsetWitness, ...]
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.halves_ok and all(c.ok for c in self.checks.values())

    def to_json(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "A": self.A,
            "A_raw": self.A_raw,
            "Q": self.Q,
            "Q_factored": self.Q_factored,
            "claim_products": list(self.products),
            "s0": self.s0,
            "j": self.j,
            "F_re": self.F.values.real.tolist(),
            "F_im": self.F.values.imag.tolist(),
            "lambda_threshold": self.lambda_threshold,
            "Eprime": self.Eprime.sorted_members(),
            "halves_ok": self.halves_ok,
            "split_low": self.split_low,
            "split_high": self.split_high,
            "sets": [s.sorted_members() for s in self.sets],
            "checks": {k: v.to_json() for k, v in sorted(self.checks.items())},
            "ok": self.ok,
        }


def trace_proof(k: Kernel, claims: Sequence[EstimateClaim], w: CombinationWeights,
                alpha: ExponentTuple, epsilon: float | None = None,
                threads: int = 1) -> ProofTrace:
    """Run the set-splitting construction on an extremal configuration and
    record every intermediate object and inequality."""
    claims = tuple(claims)
    _check_combination(alpha, [c.tuple for c in claims], w)
    best = restricted_weak_constant(k, alpha, Exhaustive(), threads=threads)
    prod = product_of_bounds(claims, w)
    if best.bound == 0 or prod == 0:
        raise EpsilonTooLarge("best constant is zero; no epsilon below it exists")
    A = best.bound / prod
    if epsilon is None:
        epsilon = 0.01 * A
    if not 0 < epsilon < A:
        raise EpsilonTooLarge(f"epsilon {epsilon!r} must lie in (0, A) with A = {A!r}")

    sets = best.witness
    m = k.arity
    mus = [measure_of(k.spaces[i], sets[i]) for i in range(m + 1)]
    chis = [indicator(E) for E in sets]
    lam_full = abs(evaluate_form(k, chis))

    Q = prod * math.prod(mu ** a for mu, a in zip(mus, alpha))
    products = tuple(
        c.bound * math.prod(mu ** a for mu, a in zip(mus, c.tuple)) for c in claims
    )
    Q_factored = math.prod(P ** th for P, th in zip(products, w))

    checks = {
        "near_extremal": _le((A - epsilon) * Q, lam_full),
        "q_identity": Check(Q, Q_factored, abs(Q - Q_factored) <= REL_TOL * Q),
    }
    candidates = [s for s, P in enumerate(products) if P <= Q * (1 + 1e-12)]
    if not candidates:
        raise AssertionError("no claim satisfies the geometric-mean bound; Q is inconsistent")
    s0 = candidates[0]
    claim = claims[s0].tuple
    j = _split_index(claim)
    a = claim[j]

    F = adjoint_apply(k, j, adjoint_args(chis, j))
    weak = weak_norm(F, 1.0 / (1.0 - a))
    mid = claims[s0].bound * math.prod(mus[i] ** claim[i] for i in range(m + 1) if i != j)
    checks["weak_bound"] = _le(weak, mid)
    checks["weak_to_Q"] = _le(mid, Q * mus[j] ** (-a))

    threshold = 2.0 ** (1.0 - a) * Q / mus[j]
    Fa = np.abs(F.values)
    Ej = sets[j]
    Eprime = SubsetWitness(Ej.space, frozenset(x for x in Ej.members if Fa[x] >= threshold))
    rest = SubsetWitness(Ej.space, Ej.members - Eprime.members)
    mu_prime = measure_of(Ej.space, Eprime)
    halves_ok = mu_prime <= 0.5 * mus[j] * (1 + 1e-12)
    checks["half"] = Check(mu_prime, 0.5 * mus[j], halves_ok)

    def split(E: SubsetWitness) -> float:
        if not E.members:
            return 0.0
        fs = list(chis)
        fs[j] = indicator(E)
        return abs(evaluate_form(k, fs))

    low, high = split(rest), split(Eprime)
    checks["split_low"] = _le(low, 2.0 ** (1.0 - a) * Q)
    checks["split_high"] = _le(high, 2.0 ** (-alpha[j]) * A * Q)
    checks["addition"] = _le((A - epsilon) * Q, low + high)
    checks["implied_bound"] = _le(A, (2.0 ** (1.0 - a) + epsilon) / (1.0 - 2.0 ** (-alpha[j])))

    return ProofTrace(
        epsilon=epsilon, A=A, A_raw=best.bound, Q=Q, Q_factored=Q_factored,
        products=products, s0=s0, j=j, F=F, lambda_threshold=threshold,
        Eprime=Eprime, halves_ok=halves_ok, split_low=low, split_high=high,
        sets=tuple(sets), checks=checks,
    )
