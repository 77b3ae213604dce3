import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mlinterp.errors import DegenerateHull, EntryAboveOne, LengthMismatch, SumNotOne, TwoNonpositive
from mlinterp.exponents import (
    CombinationWeights, classify, convex_combination, deduce_strong_region, hull_facets,
    interior_membership, interior_membership_batch, solve_combination, validate_tuple,
)

T = validate_tuple


def perms_of(v):
    return [T(p) for p in sorted(set(itertools.permutations(v)))]


BHT = [T((0, .5, .5)), T((.5, 0, .5)), T((.5, .5, 0))]


def test_validate_examples():
    t = T((0.5, 0.5, 0))
    assert not t.is_good and t.bad_index == 2
    with pytest.raises(TwoNonpositive):
        T((-0.2, -0.3, 1.5))
    with pytest.raises(EntryAboveOne):
        T((2, -1))
    with pytest.raises(SumNotOne):
        T((0.5, 0.6))
    with pytest.raises(LengthMismatch):
        T((1,))


def test_classify_examples():
    p = 3
    assert classify(T((1 / p, 1 - 1 / p))).good
    c = classify(T((-1, 1, 1)))
    assert (c.good, c.bad_index) == (False, 0)
    c = classify(T((0.5, 0.5, 0)))
    assert (c.good, c.bad_index) == (False, 2)
    assert c.to_json() == {"class": "bad", "bad_index": 2}


tuples = st.lists(st.floats(-3, 1, allow_nan=False), min_size=2, max_size=5).filter(
    lambda v: sum(x <= 0 for x in v) <= 1)


@given(st.lists(st.integers(-4, 8), min_size=2, max_size=5), st.randoms())
def test_classify_permutation_covariant(ks, rnd):
    # integer numerators over a common denominator keep the sum exactly 1
    total = sum(ks)
    if total <= 0:
        return
    vals = [k / total for k in ks]
    try:
        t = T(vals)
    except (SumNotOne, TwoNonpositive, EntryAboveOne):
        return
    perm = list(range(len(vals)))
    rnd.shuffle(perm)
    tp = T([vals[p] for p in perm])
    c, cp = classify(t), classify(tp)
    assert c.good == cp.good
    if not c.good:
        # the permuted bad index points at an entry equal to the minimum, smallest such index
        lo = min(vals)
        assert tp[cp.bad_index] == lo
        assert cp.bad_index == min(i for i, p in enumerate(perm) if vals[p] == lo)
        assert vals[perm[cp.bad_index]] == vals[c.bad_index]


def test_convex_combination_examples():
    half = CombinationWeights((0.5, 0.5))
    assert convex_combination([T((1, 0)), T((0, 1))], half).entries == (0.5, 0.5)
    third = CombinationWeights((1 / 3,) * 3)
    out = convex_combination(perms_of((-1, 1, 1)), third)
    np.testing.assert_allclose(out.entries, (1 / 3,) * 3, atol=1e-15)
    ts = perms_of((-1, 1, 1))
    assert convex_combination(ts, CombinationWeights((1, 0, 0))) == ts[0]
    with pytest.raises(LengthMismatch):
        convex_combination(ts, half)


def test_solve_combination_examples():
    w = solve_combination(T((1 / 3, 2 / 3)), [T((1, 0)), T((0, 1))])
    np.testing.assert_allclose(w.thetas, (1 / 3, 2 / 3), atol=1e-12)
    w = solve_combination(T((1 / 3,) * 3), perms_of((-1, 1, 1)))
    np.testing.assert_allclose(w.thetas, (1 / 3,) * 3, atol=1e-12)
    assert solve_combination(T((1, 0)), [T((0, 1)), T((.5, .5))]) is None


def test_solve_combination_lp_path_prefers_interior(rng):
    # four claims in a 2D hyperplane: the LP route, max-min weights
    claims = BHT + [T((1 / 3, 1 / 3, 1 / 3))]
    w = solve_combination(T((1 / 3, 1 / 3, 1 / 3)), claims)
    assert min(w.thetas) > 0.2
    for _ in range(50):
        th = rng.dirichlet(np.ones(4))
        target = convex_combination(claims, CombinationWeights(tuple(th)))
        back = convex_combination(claims, solve_combination(target, claims))
        np.testing.assert_allclose(back.entries, target.entries, atol=1e-9)


def test_roundtrip_simplex(rng):
    claims = perms_of((-2, 1, 1, 1))
    done = 0
    while done < 100:
        th = rng.dirichlet(np.ones(4))
        try:
            target = convex_combination(claims, CombinationWeights(tuple(th)))
        except TwoNonpositive:
            # the hull also holds points with two negative entries; those are not tuples
            continue
        done += 1
        w = solve_combination(target, claims)
        np.testing.assert_allclose(convex_combination(claims, w).entries, target.entries, atol=1e-9)


def test_interior_examples():
    seg = [T((1, 0)), T((0, 1))]
    assert interior_membership(T((.5, .5)), seg)
    assert not interior_membership(T((1, 0)), seg)
    assert interior_membership(T((1 / 3,) * 3), perms_of((-1, 1, 1)))
    assert interior_membership(T((1 / 3,) * 3), BHT)
    assert not interior_membership(T((0, .5, .5)), BHT)


def test_interior_lp_path_agrees_with_barycentric(rng):
    claims = BHT
    extra = claims + [T((0.25, 0.25, 0.5))]  # inside hull: same region, LP route
    pts = rng.uniform(-0.2, 0.8, (200, 2))
    pts = np.column_stack([pts, 1 - pts.sum(axis=1)])
    a = interior_membership_batch(pts, claims)
    b = interior_membership_batch(pts, extra)
    assert (a == b).all()


def test_interior_delta_configurable():
    seg = [T((1, 0)), T((0, 1))]
    near = T((1 - 1e-5, 1e-5))
    assert interior_membership(near, seg, delta=1e-6)
    assert not interior_membership(near, seg, delta=1e-4)


def test_degenerate_hull_is_empty():
    flat = [T((.5, .5, 0)), T((0, .5, .5)), T((.25, .5, .25))]
    assert solve_combination(T((.25, .5, .25)), flat) is not None
    assert not interior_membership(T((.25, .5, .25)), flat)


def test_region_wolff():
    reg = deduce_strong_region([T((1, 0)), T((0, 1))], resolution=20)
    assert len(reg.samples) == 19
    assert ((reg.samples > 0) & (reg.samples < 1)).all()
    for p in (4 / 3, 2, 4, 100):
        assert reg.contains((1 / p, 1 - 1 / p))
    assert not reg.contains((1.0, 0.0))
    assert reg.facets == [((0.0, 1.0), 1.0), ((1.0, 0.0), 1.0)]


@pytest.mark.parametrize("m", [1, 2, 3])
def test_region_tetrahedron_facets(m):
    reg = deduce_strong_region(perms_of((1 - m,) + (1,) * m), resolution=10)
    expected = sorted((tuple(float(i == k) for i in range(m + 1)), 1.0) for k in range(m + 1))
    assert reg.facets == expected
    # every good tuple satisfies x_i <= 1, so the whole good lattice is inside
    assert reg.inside.all()


def test_region_bht():
    reg = deduce_strong_region(BHT, resolution=12)
    assert reg.contains((1 / 3, 1 / 3, 1 / 3))
    assert not reg.contains((0, .5, .5))
    assert reg.facets == [((0.0, 0.0, 1.0), 0.5), ((0.0, 1.0, 0.0), 0.5), ((1.0, 0.0, 0.0), 0.5)]
    # 2 < p1, p2, p' < inf  <=>  every coordinate in (0, 1/2)
    grid = np.linspace(0.02, 0.48, 12)
    for x1, x2 in itertools.product(grid, grid):
        x0 = 1 - x1 - x2
        if 0 < x0 < 0.5 - 1e-4:
            assert reg.contains((x0, x1, x2))


def test_region_samples_are_good_and_interior():
    for claims in (BHT, perms_of((-1, 1, 1)), [T((1, 0)), T((0, 1))]):
        reg = deduce_strong_region(claims, resolution=9)
        for x in reg.samples:
            t = T(x)
            assert classify(t).good and interior_membership(t, claims)


def test_region_degenerate():
    with pytest.raises(DegenerateHull):
        deduce_strong_region([T((.5, .5)), T((.5, .5))])


@pytest.mark.parametrize("m", [2, 3])
def test_tetrahedron_predicate(rng, m):
    claims = perms_of((1 - m,) + (1,) * m)
    free = rng.uniform(-m - 1, 2, (2000, m))
    pts = np.column_stack([free, 1 - free.sum(axis=1)])
    gap = np.abs(pts.max(axis=1) - 1)
    pts = pts[gap > 1e-4]
    inside = interior_membership_batch(pts, claims)
    assert (inside == (pts.max(axis=1) < 1)).all()


def test_facets_none_above_m3():
    assert hull_facets(perms_of((-3, 1, 1, 1, 1))) is None
