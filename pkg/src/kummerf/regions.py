"""Tube-type open sets on flat tori and an exact box-subdivision cover checker.

A ``TubeConstraint`` is the open condition "distance to some center < r"
(inside) or "distance to every center > r" (outside), measured on a subset of
coordinates.  A ``Region`` is a conjunction of such constraints, optionally
minus a finite union of slabs (the singular set removed from a chart).

Box computations run on integers: every coordinate is scaled by a common
denominator D so that centers, radii and all dyadic box endpoints are exact
integers, and per-coordinate min/max circular distances give exact bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .torus import (AffineMap, Slab, TorusError, TorusPoint, circ_dist, frac, mod1,
                    signed_offset, toroidal_distance_sq)

DEFAULT_MIN_CELL = Fraction(1, 256)


@dataclass(frozen=True)
class TubeConstraint:
    coords: tuple[int, ...]
    centers: frozenset[tuple[Fraction, ...]]
    radius: Fraction
    inside: bool = True

    def __init__(self, coords, centers, radius, inside=True):
        coords = tuple(int(c) for c in coords)
        if len(set(coords)) != len(coords) or not coords:
            raise TorusError(f"bad coordinate subset {coords}")
        cs = frozenset(tuple(mod1(frac(v)) for v in c) for c in centers)
        if not cs:
            raise TorusError("tube constraint needs at least one center")
        if any(len(c) != len(coords) for c in cs):
            raise TorusError("center length does not match coordinate subset")
        radius = frac(radius)
        if radius <= 0:
            raise TorusError("radius must be positive")
        object.__setattr__(self, "coords", coords)
        object.__setattr__(self, "centers", cs)
        object.__setattr__(self, "radius", radius)
        object.__setattr__(self, "inside", bool(inside))

    def sorted_centers(self) -> list[tuple[Fraction, ...]]:
        return sorted(self.centers)

    def min_dist_sq(self, x) -> Fraction:
        return min(toroidal_distance_sq(x, _embed(c, self.coords), self.coords)
                   for c in self.centers)

    def holds(self, x) -> bool:
        r2 = self.radius ** 2
        d2 = [sum((circ_dist(frac(x[i]), v) ** 2 for i, v in zip(self.coords, c)), Fraction(0))
              for c in self.centers]
        if self.inside:
            return any(d < r2 for d in d2)
        return all(d > r2 for d in d2)

    def nearest_center(self, x) -> tuple[Fraction, ...]:
        """Center closest to ``x``; ties broken by center order."""
        best = None
        for c in self.sorted_centers():
            d = sum((circ_dist(frac(x[i]), v) ** 2 for i, v in zip(self.coords, c)), Fraction(0))
            if best is None or d < best[0]:
                best = (d, c)
        return best[1]

    def image(self, f: AffineMap) -> "TubeConstraint":
        return TubeConstraint(self.coords, (f.apply_coords(c, self.coords) for c in self.centers),
                              self.radius, self.inside)

    def scaled(self, factor) -> "TubeConstraint":
        return TubeConstraint(self.coords, self.centers, self.radius * frac(factor), self.inside)

    def negated_closure(self, factor=1) -> "TubeConstraint":
        """Complement of the closed tube at ``factor`` times the radius."""
        return TubeConstraint(self.coords, self.centers, self.radius * frac(factor), not self.inside)


def _embed(values, coords):
    """Turn a partial point on ``coords`` into an index->value mapping usable as x[i]."""
    return dict(zip(coords, values))


@dataclass(frozen=True)
class Region:
    dim: int
    constraints: tuple[TubeConstraint, ...] = ()
    excluded: tuple[Slab, ...] = ()

    def __init__(self, dim, constraints=(), excluded=()):
        constraints = tuple(constraints)
        for c in constraints:
            if max(c.coords) >= dim:
                raise TorusError("constraint coordinate out of range")
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "constraints", constraints)
        object.__setattr__(self, "excluded", tuple(sorted(set(excluded))))

    def unpunctured(self) -> "Region":
        return Region(self.dim, self.constraints)

    def with_excluded(self, slabs: Iterable[Slab]) -> "Region":
        return Region(self.dim, self.constraints, slabs)

    def coords_used(self) -> set[int]:
        return {i for c in self.constraints for i in c.coords}


def contains(r: Region, x) -> bool:
    if len(x) != r.dim:
        raise TorusError("dimension mismatch")
    if not all(c.holds(x) for c in r.constraints):
        return False
    return not any(s.contains(x) for s in r.excluded)


def image_region(f: AffineMap, r: Region) -> Region:
    if f.dim != r.dim:
        raise TorusError("dimension mismatch")
    from .torus import map_slab
    return Region(r.dim, (c.image(f) for c in r.constraints), (map_slab(f, s) for s in r.excluded))


def is_invariant(f: AffineMap, r: Region) -> bool:
    img = image_region(f, r)
    return (all(a.centers == b.centers for a, b in zip(img.constraints, r.constraints))
            and set(img.excluded) == set(r.excluded))


def noninvariant_constraint(f: AffineMap, r: Region) -> int | None:
    """Index of the first constraint whose center set ``f`` does not preserve."""
    for k, c in enumerate(r.constraints):
        if c.image(f).centers != c.centers:
            return k
    return None


# ---------------------------------------------------------------------------
# integer-scaled box engine


@dataclass(frozen=True)
class Box:
    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]

    def sample(self, rng) -> TorusPoint:
        return TorusPoint(l + (h - l) * Fraction(rng.randrange(0, 1 << 20), 1 << 20)
                          for l, h in zip(self.lo, self.hi))

    def __str__(self):
        from .torus import fmt
        return " x ".join(f"[{fmt(l)},{fmt(h)}]" for l, h in zip(self.lo, self.hi))


@dataclass
class CoverResult:
    status: str  # "covered" | "uncovered" | "undecided"
    witness: TorusPoint | None = None
    boxes: list[Box] = field(default_factory=list)
    n_boxes: int = 0
    discharged: list[tuple[Box, int]] = field(default_factory=list)

    @property
    def covered(self) -> bool:
        return self.status == "covered"


class _Scaled:
    """Regions rescaled to integers on the coordinates they constrain."""

    def __init__(self, regions: Sequence[Region], min_cell: Fraction, extra_denoms=()):
        self.dim = regions[0].dim if regions else 0
        used = sorted(set().union(*(r.coords_used() for r in regions))) if regions else []
        self.used = used
        pos = {c: k for k, c in enumerate(used)}
        denoms = [1, *extra_denoms]
        for r in regions:
            for c in r.constraints:
                denoms.append(c.radius.denominator)
                denoms.extend(v.denominator for ctr in c.centers for v in ctr)
        base = math.lcm(*denoms)
        levels = max(1, math.ceil(math.log2(1 / min_cell))) if min_cell < 1 else 1
        self.D = base * (1 << (levels + 3))
        self.min_width = min_cell * self.D
        self.regions = []
        for r in regions:
            cons = []
            for c in r.constraints:
                idx = np.array([pos[i] for i in c.coords], dtype=np.int64)
                ctrs = np.array([[int(v * self.D) for v in ctr] for ctr in c.sorted_centers()],
                                dtype=np.int64)
                r2 = int((c.radius * self.D) ** 2)
                cons.append((idx, ctrs, r2, c.inside))
            self.regions.append(cons)

    def constraint_state(self, con, lo, hi):
        """+1 definitely true on the closed box, -1 definitely false, 0 undecided."""
        idx, ctrs, r2, inside = con
        D = self.D
        l = lo[idx]
        w = hi[idx] - l
        t = (ctrs - l) % D
        dmin = np.where(t <= w, 0, np.minimum(t - w, D - t))
        ta = (ctrs + D // 2 - l) % D
        dl = np.abs(ctrs - l) % D
        dl = np.minimum(dl, D - dl)
        h = hi[idx]
        dh = np.abs(ctrs - h) % D
        dh = np.minimum(dh, D - dh)
        dmax = np.where(ta <= w, D // 2, np.maximum(dl, dh))
        dmin2 = (dmin * dmin).sum(axis=1)
        dmax2 = (dmax * dmax).sum(axis=1)
        if inside:
            if (dmax2 < r2).any():
                return 1
            if (dmin2 >= r2).all():
                return -1
            return 0
        if (dmin2 > r2).all():
            return 1
        if (dmax2 <= r2).any():
            return -1
        return 0

    def slack(self, con, p):
        idx, ctrs, r2, inside = con
        D = self.D
        d = np.abs(ctrs - p[idx]) % D
        d = np.minimum(d, D - d).astype(float)
        dist = math.sqrt(float((d * d).sum(axis=1).min()))
        r = math.sqrt(r2)
        return r - dist if inside else dist - r

    def region_slack(self, k, p):
        cons = self.regions[k]
        if not cons:
            return math.inf
        return min(self.slack(c, p) for c in cons)

    def to_box(self, lo, hi) -> Box:
        D = self.D
        flo = [Fraction(0)] * self.dim
        fhi = [Fraction(1)] * self.dim
        for k, c in enumerate(self.used):
            flo[c] = Fraction(int(lo[k]), D)
            fhi[c] = Fraction(int(hi[k]), D)
        return Box(tuple(flo), tuple(fhi))

    def to_point(self, p) -> TorusPoint:
        x = [Fraction(1, 3)] * self.dim
        for k, c in enumerate(self.used):
            x[c] = Fraction(int(p[k]), self.D)
        return TorusPoint(x)


def _coordinate_map_preserves(con: TubeConstraint, i: int, sign: int, shift: Fraction) -> bool:
    k = con.coords.index(i)
    img = {c[:k] + (mod1(sign * c[k] + shift),) + c[k + 1:] for c in con.centers}
    return img == con.centers


def fundamental_interval(regions: Sequence[Region], i: int) -> tuple[Fraction, Fraction]:
    """Interval of coordinate ``i`` meeting every orbit of the union's one-coordinate symmetries.

    The candidate symmetries are translations x_i -> x_i + t and reflections
    x_i -> a - x_i that map every constraint's center set onto itself; they act
    on each coordinate independently and preserve every region, so covering
    the product of these intervals covers the torus.
    """
    cons = [c for r in regions for c in r.constraints if i in c.coords]
    if not cons:
        return Fraction(0), Fraction(1)
    k = cons[0].coords.index(i)
    vals = sorted({c[k] for c in cons[0].centers})
    v0 = vals[0]
    periods = [t for t in sorted({mod1(v - v0) for v in vals}) if t
               and all(_coordinate_map_preserves(c, i, 1, t) for c in cons)]
    tau = periods[0] if periods else Fraction(1)
    axes = [a for a in sorted({mod1(v + v0) for v in vals})
            if all(_coordinate_map_preserves(c, i, -1, a) for c in cons)]
    if axes:
        return axes[0] / 2, axes[0] / 2 + tau / 2
    return Fraction(0), tau


def check_cover(regions: Sequence[Region], min_cell=DEFAULT_MIN_CELL, trace: bool = False,
                max_boxes: int = 5_000_000, symmetry: bool = True) -> CoverResult:
    """Decide whether the union of ``regions`` covers the torus.

    Excluded slabs are ignored here; callers that puncture regions must check
    separately that the punctures are covered.  Only coordinates constrained by
    some region are subdivided, and with ``symmetry`` only over a fundamental
    interval of each coordinate's symmetries.
    """
    min_cell = frac(min_cell)
    if min_cell <= 0:
        raise TorusError("min_cell must be positive")
    if not regions:
        return CoverResult("uncovered")
    dim = regions[0].dim
    if any(r.dim != dim for r in regions):
        raise TorusError("regions of different dimensions")
    if any(not r.constraints for r in regions):
        return CoverResult("covered", n_boxes=0)
    sc = _Scaled(regions, min_cell)
    n = len(sc.used)
    D = sc.D
    lo0, hi0 = np.zeros(n, dtype=np.int64), np.full(n, D, dtype=np.int64)
    if symmetry:
        for k, i in enumerate(sc.used):
            a, b = fundamental_interval(regions, i)
            lo0[k], hi0[k] = int(a * D), int(b * D)
    stack = [(lo0, hi0, tuple(range(len(regions))))]
    undecided: list[Box] = []
    discharged = []
    count = 0
    while stack:
        lo, hi, live = stack.pop()
        count += 1
        if count > max_boxes:
            raise RuntimeError("cover check exceeded box budget")
        new_live = []
        undecided_coords: dict[int, set[int]] = {}
        done = None
        for k in live:
            states = [sc.constraint_state(c, lo, hi) for c in sc.regions[k]]
            if any(s < 0 for s in states):
                continue
            if all(s > 0 for s in states):
                done = k
                break
            new_live.append(k)
            undecided_coords[k] = {int(i) for c, s in zip(sc.regions[k], states) if s == 0
                                   for i in c[0]}
        if done is not None:
            if trace:
                discharged.append((sc.to_box(lo, hi), done))
            continue
        mid = (lo + hi) // 2
        if not new_live:
            return CoverResult("uncovered", witness=sc.to_point(mid), n_boxes=count)
        best, best_slack = None, -math.inf
        for k in new_live:
            s = sc.region_slack(k, mid)
            if s > best_slack:
                best, best_slack = k, s
        width = hi - lo
        axis = None
        if best_slack > 0:
            cand = undecided_coords[best]
            axis = _widest(width, cand, sc.min_width)
        if axis is None:
            cand = set().union(*undecided_coords.values())
            axis = _widest(width, cand, sc.min_width)
        if axis is None:
            # a degenerate box is a point, where the integer states are exact
            if not any(all(sc.constraint_state(c, mid, mid) > 0 for c in sc.regions[k]) for k in new_live):
                return CoverResult("uncovered", witness=sc.to_point(mid), n_boxes=count)
            undecided.append(sc.to_box(lo, hi))
            continue
        half = (lo[axis] + hi[axis]) // 2
        hi1 = hi.copy()
        hi1[axis] = half
        lo2 = lo.copy()
        lo2[axis] = half
        live_t = tuple(new_live)
        stack.append((lo2, hi, live_t))
        stack.append((lo, hi1, live_t))
    if undecided:
        return CoverResult("undecided", boxes=undecided, n_boxes=count, discharged=discharged)
    return CoverResult("covered", n_boxes=count, discharged=discharged)


def _widest(width, cand, min_width):
    best = None
    for i in sorted(cand):
        if width[i] > min_width and width[i] >= 2 and (best is None or width[i] > width[best]):
            best = i
    return best


# ---------------------------------------------------------------------------
# disjointness


def _separated(a: TubeConstraint, b: TubeConstraint) -> bool:
    """Two inside-tubes are disjoint if their centers are far apart on shared coordinates."""
    shared = [i for i in a.coords if i in b.coords]
    if not shared:
        return False
    ia = [a.coords.index(i) for i in shared]
    ib = [b.coords.index(i) for i in shared]
    bound = (a.radius + b.radius) ** 2
    for ca in a.centers:
        for cb in b.centers:
            d2 = sum((circ_dist(ca[p], cb[q]) ** 2 for p, q in zip(ia, ib)), Fraction(0))
            if d2 < bound:
                return False
    return True


def _ball_misses(inside: TubeConstraint, outside: TubeConstraint) -> bool:
    """An inside-tube lies in the complement of an outside-constraint.

    Holds when the outside coordinates are a subset of the tube's, every tube
    center projects onto an outside center and the tube radius is at most the
    outside radius (projection does not increase distance).
    """
    if not set(outside.coords) <= set(inside.coords) or inside.radius > outside.radius:
        return False
    idx = [inside.coords.index(i) for i in outside.coords]
    return all(tuple(c[k] for k in idx) in outside.centers for c in inside.centers)


def _closest_pair_witness(a: TubeConstraint, b: TubeConstraint, dim: int) -> TorusPoint | None:
    shared = [i for i in a.coords if i in b.coords]
    best = None
    for ca in a.sorted_centers():
        for cb in b.sorted_centers():
            pa = dict(zip(a.coords, ca))
            pb = dict(zip(b.coords, cb))
            d2 = sum((circ_dist(pa[i], pb[i]) ** 2 for i in shared), Fraction(0))
            if best is None or d2 < best[0]:
                best = (d2, pa, pb)
    d2, pa, pb = best
    if d2 >= (a.radius + b.radius) ** 2:
        return None
    t = a.radius / (a.radius + b.radius)
    x = [Fraction(0)] * dim
    for i in range(dim):
        if i in pa and i in pb:
            x[i] = pa[i] + t * signed_offset(pb[i], pa[i])
        elif i in pa:
            x[i] = pa[i]
        elif i in pb:
            x[i] = pb[i]
    return TorusPoint(x)


def pairwise_disjoint(tubes: Sequence[Region]):
    """Check that single inside-constraint regions are pairwise disjoint.

    Returns ``(True, None)`` or ``(False, (i, j, witness_point))``.
    """
    for r in tubes:
        if len(r.constraints) != 1 or not r.constraints[0].inside:
            raise TorusError("pairwise_disjoint expects single inside-tube regions")
    for i in range(len(tubes)):
        for j in range(i + 1, len(tubes)):
            a, b = tubes[i].constraints[0], tubes[j].constraints[0]
            if _separated(a, b):
                continue
            w = _closest_pair_witness(a, b, tubes[i].dim)
            if w is None or not (contains(tubes[i], w) and contains(tubes[j], w)):
                raise AssertionError("failed to construct an intersection witness")
            return False, (i, j, w)
    return True, None


def regions_intersect(a: Region, b: Region, min_cell=DEFAULT_MIN_CELL, max_boxes: int = 400_000):
    """Decide whether two regions (ignoring punctures) meet.

    Returns ``(True, witness)``, ``(False, None)`` or ``(None, None)`` when the
    subdivision reaches ``min_cell`` without a decision.
    """
    if not a.constraints or not b.constraints:
        return True, TorusPoint([Fraction(1, 3)] * a.dim) if not (a.constraints or b.constraints) \
            else _any_point(a if a.constraints else b, min_cell)
    for ca in a.constraints:
        for cb in b.constraints:
            if ca.inside and cb.inside and _separated(ca, cb):
                return False, None
            if ca.inside and not cb.inside and _ball_misses(ca, cb):
                return False, None
            if cb.inside and not ca.inside and _ball_misses(cb, ca):
                return False, None
    return _box_intersect([a.unpunctured(), b.unpunctured()], frac(min_cell), max_boxes)


def _any_point(r: Region, min_cell):
    return _box_intersect([r.unpunctured()], frac(min_cell), 400_000)


def _box_intersect(regions, min_cell, max_boxes):
    sc = _Scaled(regions, min_cell)
    n = len(sc.used)
    cons = [c for reg in sc.regions for c in reg]
    stack = [(np.zeros(n, dtype=np.int64), np.full(n, sc.D, dtype=np.int64))]
    count = 0
    unknown = False
    while stack:
        lo, hi = stack.pop()
        count += 1
        if count > max_boxes:
            return None, None
        states = [sc.constraint_state(c, lo, hi) for c in cons]
        if any(s < 0 for s in states):
            continue
        mid = (lo + hi) // 2
        pt = sc.to_point(mid)
        if all(contains(r, pt) for r in regions):
            return True, pt
        cand = {int(i) for c, s in zip(cons, states) if s == 0 for i in c[0]}
        axis = _widest(hi - lo, cand, sc.min_width)
        if axis is None:
            unknown = True
            continue
        half = (lo[axis] + hi[axis]) // 2
        hi1 = hi.copy()
        hi1[axis] = half
        lo2 = lo.copy()
        lo2[axis] = half
        stack.append((lo2, hi))
        stack.append((lo, hi1))
    return (None, None) if unknown else (False, None)
