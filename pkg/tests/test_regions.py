import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kummerf.regions import (Region, TubeConstraint, check_cover, contains, fundamental_interval,
                             image_region, is_invariant, noninvariant_constraint, pairwise_disjoint,
                             regions_intersect)
from kummerf.torus import AffineMap, Slab, TorusError, TorusPoint, toroidal_distance_sq

HALF = Fraction(1, 2)
P = [Fraction(0), HALF]
rationals = st.builds(Fraction, st.integers(0, 255), st.just(256))


def points(dim):
    return st.builds(TorusPoint, st.lists(rationals, min_size=dim, max_size=dim))


def tube(coords, centers, r, inside=True):
    return TubeConstraint(coords, centers, Fraction(r), inside)


def test_tube_membership_is_strict():
    t = tube([0, 1], [(0, 0)], Fraction(1, 4))
    assert t.holds(TorusPoint([Fraction(1, 8), 0, 0]))
    assert not t.holds(TorusPoint([Fraction(1, 4), 0, 0]))
    assert not t.negated_closure().holds(TorusPoint([Fraction(1, 4), 0, 0]))
    assert t.negated_closure().holds(TorusPoint([Fraction(1, 3), 0, 0]))
    assert t.nearest_center(TorusPoint([Fraction(15, 16), 0, 0])) == (0, 0)


@given(points(3), st.lists(st.tuples(rationals, rationals), min_size=1, max_size=4),
       st.integers(1, 8))
def test_tube_agrees_with_distance(x, centers, r16):
    t = tube([0, 2], centers, Fraction(r16, 16))
    r2 = t.radius ** 2
    d2 = min(toroidal_distance_sq(x, {0: a, 2: b}, [0, 2]) for a, b in centers)
    assert t.min_dist_sq(x) == d2
    assert t.holds(x) == (d2 < r2)
    assert t.negated_closure().holds(x) == (d2 > r2)


def test_region_with_punctures():
    r = Region(2, [tube([0, 1], [(0, 0)], HALF)], [Slab(2, {0: 0, 1: 0})])
    assert not contains(r, TorusPoint([0, 0]))
    assert contains(r, TorusPoint([Fraction(1, 16), 0]))
    assert contains(r.unpunctured(), TorusPoint([0, 0]))
    with pytest.raises(TorusError):
        Region(2, [tube([0, 3], [(0, 0)], HALF)])


def test_invariance_of_regions():
    J = AffineMap([-1, -1])
    r = Region(2, [tube([0, 1], [(a, b) for a in P for b in P], Fraction(1, 8))])
    assert is_invariant(J, r)
    shifted = AffineMap([1, 1], [Fraction(1, 4), 0])
    assert not is_invariant(shifted, r)
    assert noninvariant_constraint(shifted, r) == 0
    img = image_region(shifted, r)
    assert contains(img, TorusPoint([Fraction(1, 4), 0]))


def test_whole_torus_and_trivial_failures():
    assert check_cover([Region(3)]).covered
    res = check_cover([Region(2, [tube([0, 1], [(0, 0)], Fraction(1, 4))])], Fraction(1, 64))
    assert res.status == "uncovered"
    assert not contains(Region(2, [tube([0, 1], [(0, 0)], Fraction(1, 4))]), res.witness)


def test_circle_cover_by_two_arcs():
    a = Region(1, [tube([0], [(0,)], Fraction(1, 3))])
    b = Region(1, [tube([0], [(HALF,)], Fraction(1, 3))])
    assert check_cover([a, b], Fraction(1, 256)).covered
    short = Region(1, [tube([0], [(HALF,)], Fraction(1, 8))])
    res = check_cover([a, short], Fraction(1, 256))
    assert res.status == "uncovered"
    assert not contains(a, res.witness) and not contains(short, res.witness)


def test_k3_like_cover():
    # outside the 16 half-lattice tubes on (x2, x3) or inside one of them
    c = [(a, b) for a in P for b in P]
    out = Region(4, [tube([1, 2], c, Fraction(1, 32), inside=False)])
    balls = [Region(4, [tube([1, 2], [ctr], Fraction(1, 16))]) for ctr in c]
    assert check_cover([out] + balls).covered
    res = check_cover([out] + balls[:-1])
    assert res.status == "uncovered" and not any(contains(r, res.witness) for r in [out] + balls[:-1])


def test_fundamental_interval_uses_symmetries():
    c = [(a, b) for a in P for b in P]
    regs = [Region(2, [tube([0, 1], c, Fraction(1, 8))])]
    lo, hi = fundamental_interval(regs, 0)
    assert (lo, hi) == (0, Fraction(1, 4))
    # centers 0 and 1/3: no translation survives, only the reflection through 1/6
    regs = [Region(1, [tube([0], [(0,), (Fraction(1, 3),)], Fraction(1, 8))])]
    lo, hi = fundamental_interval(regs, 0)
    assert hi - lo == HALF
    assert fundamental_interval([Region(3)], 1) == (0, 1)


centers_2d = st.lists(st.tuples(st.sampled_from([Fraction(k, 8) for k in range(8)]),
                                st.sampled_from([Fraction(k, 8) for k in range(8)])),
                      min_size=1, max_size=4, unique=True)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(centers_2d, st.integers(1, 6), st.booleans()), min_size=1, max_size=4))
def test_symmetry_reduction_does_not_change_the_verdict(spec):
    regs = [Region(2, [tube([0, 1], cs, Fraction(r, 16), inside)]) for cs, r, inside in spec]
    a = check_cover(regs, Fraction(1, 64), symmetry=True)
    b = check_cover(regs, Fraction(1, 64), symmetry=False)
    if "undecided" not in (a.status, b.status):
        assert a.status == b.status
    for res in (a, b):
        if res.status == "uncovered":
            assert not any(contains(r, res.witness) for r in regs)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.tuples(centers_2d, st.integers(2, 6), st.booleans()), min_size=1, max_size=3))
def test_covered_verdict_survives_random_sampling(spec):
    regs = [Region(2, [tube([0, 1], cs, Fraction(r, 16), inside)]) for cs, r, inside in spec]
    if check_cover(regs, Fraction(1, 64)).covered:
        rng = random.Random(1)
        for _ in range(300):
            x = TorusPoint([Fraction(rng.randrange(4096), 4096) for _ in range(2)])
            assert any(contains(r, x) for r in regs)


def test_pairwise_disjoint_and_intersections():
    a = Region(3, [tube([0, 1], [(0, 0)], Fraction(1, 16))])
    b = Region(3, [tube([1, 2], [(HALF, 0)], Fraction(1, 16))])
    c = Region(3, [tube([1, 2], [(Fraction(1, 32), 0)], Fraction(1, 16))])
    assert pairwise_disjoint([a, b]) == (True, None)
    ok, (i, j, w) = pairwise_disjoint([a, b, c])
    assert not ok and (i, j) == (0, 2) and contains(a, w) and contains(c, w)
    assert regions_intersect(a, b)[0] is False
    hit, w = regions_intersect(a, c)
    assert hit and contains(a, w) and contains(c, w)
    out = Region(3, [tube([0, 1], [(0, 0)], Fraction(1, 32), inside=False)])
    inner = Region(3, [tube([0, 1], [(0, 0)], Fraction(1, 64))])
    assert regions_intersect(inner, out)[0] is False
