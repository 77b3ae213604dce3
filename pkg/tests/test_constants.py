import itertools
import math

import numpy as np
import pytest

from mlinterp import constants
from mlinterp.constants import (
    AscentConfig, EstimateClaim, Exhaustive, RandomSearch, char_quotient,
    restricted_weak_constant, strong_type_lower,
)
from mlinterp.errors import EmptySet, NotGoodTuple, SpaceTooLarge
from mlinterp.exponents import validate_tuple as T
from mlinterp.forms import Kernel
from mlinterp.spaces import indicator, make_space, subset

from conftest import nonempty_subsets, random_kernel


def oracle_quotient(k, t, sets):
    """Direct loops: no numpy contraction, no library norm code."""
    m = k.arity
    w = [s.weights for s in k.spaces]
    mu = [sum(w[i][x] for x in sets[i]) for i in range(m + 1)]
    if all(0 < a < 1 for a in t):
        total = 0j
        for idx in itertools.product(*sets):
            term = k.values[idx]
            for i, x in enumerate(idx):
                term *= w[i][x]
            total += term
        return abs(total) / math.prod(mu[i] ** t[i] for i in range(m + 1))
    j = min(range(m + 1), key=lambda i: (t[i], i))
    F = []
    for xj in range(k.dims[j]):
        total = 0j
        others = [sets[i] if i != j else [xj] for i in range(m + 1)]
        for idx in itertools.product(*others):
            term = k.values[idx]
            for i, x in enumerate(idx):
                if i != j:
                    term *= w[i][x]
            total += term
        F.append(abs(total))
    p = 1 / (1 - t[j])
    weak = max((v * sum(w[j][y] for y in range(len(F)) if F[y] >= v) ** (1 / p) for v in F if v > 0),
               default=0.0)
    return weak / math.prod(mu[i] ** t[i] for i in range(m + 1) if i != j)


def oracle_sup(k, t):
    j = None if all(0 < a < 1 for a in t) else min(range(k.arity + 1), key=lambda i: (t[i], i))
    choices = [[(0,)] if i == j else list(nonempty_subsets(n)) for i, n in enumerate(k.dims)]
    return max(oracle_quotient(k, t, sets) for sets in itertools.product(*choices))


def identity(n):
    s = make_space([1] * n)
    return Kernel((s, s), np.eye(n))


def sets_of(k, members):
    return [subset(s, e) for s, e in zip(k.spaces, members)]


def test_char_quotient_identity():
    k = identity(2)
    assert char_quotient(k, T((.5, .5)), sets_of(k, [{0}, {0}])) == 1


def test_char_quotient_empty_set():
    k = identity(2)
    with pytest.raises(EmptySet):
        char_quotient(k, T((.5, .5)), sets_of(k, [set(), {0}]))


def test_char_quotient_matches_oracle(rng):
    tuples = [T((1 / 3,) * 3), T((-1, 1, 1)), T((1, -1, 1)), T((0.5, 0.5, 0)), T((0.2, 0.3, 0.5))]
    for _ in range(40):
        k = random_kernel(rng, (2, 3, 2))
        members = [np.flatnonzero(rng.random(n) < 0.6).tolist() or [0] for n in k.dims]
        for t in tuples:
            assert char_quotient(k, t, sets_of(k, members)) == pytest.approx(
                oracle_quotient(k, t, members), rel=1e-12)


def test_char_quotient_homogeneous(rng):
    k = random_kernel(rng, (3, 3))
    sets = sets_of(k, [{0, 2}, {1}])
    c = 2.5 - 1.5j
    for t in (T((.3, .7)), T((1, 0))):
        assert char_quotient(k.scaled(c), t, sets) == pytest.approx(abs(c) * char_quotient(k, t, sets), rel=1e-13)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_identity_exhaustive_is_one(n):
    claim = restricted_weak_constant(identity(n), T((.5, .5)))
    assert claim.bound == pytest.approx(1.0, abs=1e-15)
    # Cauchy-Schwarz: equality exactly when E_0 = E_1
    assert claim.witness[0].members == claim.witness[1].members
    assert claim.provenance == "exhaustive"


def test_zero_kernel():
    s = make_space([1, 2, 3])
    k = Kernel((s, s, s), np.zeros((3, 3, 3)))
    for t in (T((-1, 1, 1)), T((1 / 3,) * 3)):
        assert restricted_weak_constant(k, t).bound == 0
        assert restricted_weak_constant(k, t, RandomSearch(1, 5, 3)).bound == 0


def test_exhaustive_matches_brute_force(rng):
    tuples2 = [T((.5, .5)), T((.25, .75)), T((1, 0)), T((0, 1))]
    for _ in range(10):
        k = random_kernel(rng, (3, 4))
        for t in tuples2:
            claim = restricted_weak_constant(k, t)
            assert claim.bound == pytest.approx(oracle_sup(k, t), rel=1e-12)
            assert char_quotient(k, t, claim.witness) == pytest.approx(claim.bound, rel=1e-9)
    for _ in range(5):
        k = random_kernel(rng, (3, 2, 3))
        for t in (T((-1, 1, 1)), T((1, 1, -1)), T((1 / 3,) * 3), T((.5, 0, .5))):
            claim = restricted_weak_constant(k, t)
            assert claim.bound == pytest.approx(oracle_sup(k, t), rel=1e-12)
            assert char_quotient(k, t, claim.witness) == pytest.approx(claim.bound, rel=1e-9)


def test_space_too_large():
    s = make_space([1] * 17)
    k = Kernel((s, make_space([1])), np.ones((17, 1)))
    with pytest.raises(SpaceTooLarge):
        restricted_weak_constant(k, T((.5, .5)))


def test_random_search_below_exhaustive_and_seeded(rng):
    for _ in range(10):
        k = random_kernel(rng, (4, 3, 3))
        for t in (T((-1, 1, 1)), T((1 / 3,) * 3)):
            exact = restricted_weak_constant(k, t).bound
            mode = RandomSearch(seed=7, iters=30, restarts=6)
            a = restricted_weak_constant(k, t, mode)
            b = restricted_weak_constant(k, t, mode, threads=3)
            assert a.bound <= exact * (1 + 1e-12)
            assert a.bound == b.bound
            assert [w.members for w in a.witness] == [w.members for w in b.witness]


def test_homogeneity(rng):
    for _ in range(10):
        k = random_kernel(rng, (3, 3, 2))
        for t in (T((-1, 1, 1)), T((0.2, 0.3, 0.5))):
            base = restricted_weak_constant(k, t).bound
            # power-of-two moduli keep every quotient exact
            for c in (2.0, -0.25, 4j):
                assert restricted_weak_constant(k.scaled(c), t).bound == abs(c) * base
                s1 = restricted_weak_constant(k, t, RandomSearch(3, 10, 4)).bound
                s2 = restricted_weak_constant(k.scaled(c), t, RandomSearch(3, 10, 4)).bound
                assert s2 == abs(c) * s1
            c = 0.3 + 1.7j
            assert restricted_weak_constant(k.scaled(c), t).bound == pytest.approx(abs(c) * base, rel=1e-12)


def test_permutation_covariance(rng):
    for _ in range(10):
        k = random_kernel(rng, (2, 3, 4))
        for t in (T((-1, 1, 1)), T((0.5, 0, 0.5)), T((0.2, 0.3, 0.5))):
            base = restricted_weak_constant(k, t)
            for perm in itertools.permutations(range(3)):
                kp = k.permuted(perm)
                tp = T([t[p] for p in perm])
                claim = restricted_weak_constant(kp, tp)
                assert claim.bound == pytest.approx(base.bound, rel=1e-12)
                # witness pulled back through the permutation is still extremal
                back = [None] * 3
                for i, p in enumerate(perm):
                    back[p] = claim.witness[i].members
                assert char_quotient(k, t, sets_of(k, back)) == pytest.approx(base.bound, rel=1e-12)
                if t.is_good:
                    assert back == [w.members for w in base.witness] or \
                        char_quotient(k, t, base.witness) == pytest.approx(base.bound, rel=1e-12)


def test_threads_do_not_change_result(rng, monkeypatch):
    monkeypatch.setattr(constants, "CHUNK_ELEMENTS", 64)
    k = random_kernel(rng, (6, 5, 4))
    for t in (T((-1, 1, 1)), T((0.2, 0.3, 0.5))):
        a = restricted_weak_constant(k, t, threads=1)
        b = restricted_weak_constant(k, t, threads=8)
        assert a.bound == b.bound
        assert [w.members for w in a.witness] == [w.members for w in b.witness]
    monkeypatch.undo()
    assert restricted_weak_constant(k, t).bound == a.bound


def test_estimate_claim_json():
    k = identity(2)
    js = restricted_weak_constant(k, T((.5, .5))).to_json()
    assert js == {"alpha": [.5, .5], "bound": 1.0, "provenance": "exhaustive", "witness": [[0], [0]]}
    assert EstimateClaim(T((1, 0)), 2.0).to_json()["provenance"] == "user"
    with pytest.raises(ValueError):
        EstimateClaim(T((1, 0)), -1.0)


# -- strong type ----------------------------------------------------------------

def test_strong_identity():
    for n in (2, 4):
        claim = strong_type_lower(identity(n), T((.5, .5)))
        assert claim.bound == pytest.approx(1.0, abs=1e-6)


def test_strong_zero_kernel():
    s = make_space([1, 1])
    assert strong_type_lower(Kernel((s, s), np.zeros((2, 2))), T((.5, .5))).bound == 0


def test_strong_rejects_bad_tuple():
    with pytest.raises(NotGoodTuple):
        strong_type_lower(identity(2), T((1, 0)))


def test_strong_monotone_and_dominates_char(rng):
    for _ in range(15):
        k = random_kernel(rng, (3, 3, 3))
        t = T((0.2, 0.3, 0.5))
        char = restricted_weak_constant(k, t)
        claim = strong_type_lower(k, t, AscentConfig(max_iter=200, seed=1),
                                  initial=[indicator(E) for E in char.witness])
        h = np.array(claim.history)
        assert (np.diff(h) >= -1e-12 * h[1:]).all()
        assert claim.bound >= char.bound * (1 - 1e-12)


def test_strong_matches_operator_norm_at_half():
    # at (1/2, 1/2) with unit weights the strong constant is the spectral norm
    rng = np.random.default_rng(5)
    s = make_space([1] * 4)
    K = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    claim = strong_type_lower(Kernel((s, s), K), T((.5, .5)), AscentConfig(max_iter=2000))
    assert claim.bound == pytest.approx(np.linalg.norm(K, 2), rel=1e-6)
