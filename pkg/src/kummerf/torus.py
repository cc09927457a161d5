"""Exact arithmetic on flat tori T^n = R^n / Z^n.

Points carry ``Fraction`` coordinates canonicalized into [0, 1).  Isometries
are restricted to sign-diagonal affine maps ``x -> signs * x + shift``, which
is enough for every Kummer-type quotient handled by this package and keeps
fixed loci and slab images axis-aligned.

Coordinates are 0-based everywhere in the Python API.  Spec files and
human-readable output use 1-based coordinates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

DEFAULT_GROUP_BOUND = 4096


class TorusError(ValueError):
    pass


def frac(value) -> Fraction:
    """Parse ``value`` ("p/q" string, int or Fraction) into a Fraction.

    Floats are rejected: every constant on the torus must be exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TorusError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise TorusError(f"not a rational: {value!r}") from exc
    raise TorusError(f"not an exact rational: {value!r}")


def mod1(x: Fraction) -> Fraction:
    return x - math.floor(x)


def fmt(x: Fraction) -> str:
    """Serialize a rational as "p/q" (or "p" when integral)."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def circ_dist(a: Fraction, b: Fraction) -> Fraction:
    d = mod1(a - b)
    return min(d, 1 - d)


def signed_offset(x: Fraction, c: Fraction) -> Fraction:
    """Shortest signed displacement from ``c`` to ``x`` on the circle, in [-1/2, 1/2)."""
    d = mod1(x - c)
    return d - 1 if d >= Fraction(1, 2) else d


@dataclass(frozen=True)
class TorusPoint:
    coords: tuple[Fraction, ...]

    def __init__(self, coords: Iterable):
        object.__setattr__(self, "coords", tuple(mod1(frac(c)) for c in coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def project(self, coords: Sequence[int]) -> tuple[Fraction, ...]:
        return tuple(self.coords[i] for i in coords)

    def __str__(self):
        return "(" + ", ".join(fmt(c) for c in self.coords) + ")"


def toroidal_distance_sq(a, b, coords: Sequence[int] | None = None) -> Fraction:
    """Squared flat distance between ``a`` and ``b`` over the given coordinates."""
    if coords is None:
        coords = range(len(a))
    return sum((circ_dist(frac(a[i]), frac(b[i])) ** 2 for i in coords), Fraction(0))


@dataclass(frozen=True)
class AffineMap:
    """The isometry x -> signs * x + shift (mod 1)."""

    signs: tuple[int, ...]
    shift: tuple[Fraction, ...]

    def __init__(self, signs: Iterable[int], shift: Iterable | None = None):
        signs = tuple(int(s) for s in signs)
        if any(s not in (1, -1) for s in signs):
            raise TorusError(f"signs must be +1/-1, got {signs}")
        if shift is None:
            shift = [0] * len(signs)
        shift = tuple(mod1(frac(c)) for c in shift)
        if len(shift) != len(signs):
            raise TorusError("signs and shift have different lengths")
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "shift", shift)

    @classmethod
    def identity(cls, dim: int) -> "AffineMap":
        return cls([1] * dim)

    @classmethod
    def from_linear(cls, matrix: Sequence[Sequence[int]], shift=None) -> "AffineMap":
        """Build from an integer matrix, which must be diagonal with +-1 entries."""
        n = len(matrix)
        signs = []
        for i, row in enumerate(matrix):
            if len(row) != n:
                raise TorusError("linear part must be square")
            for j, v in enumerate(row):
                if i != j and v != 0:
                    raise TorusError(
                        f"only sign-diagonal linear parts are supported (entry {i + 1},{j + 1} = {v})")
            if row[i] not in (1, -1):
                raise TorusError(
                    f"only sign-diagonal linear parts are supported (diagonal entry {i + 1} = {row[i]})")
            signs.append(row[i])
        return cls(signs, shift)

    @property
    def dim(self) -> int:
        return len(self.signs)

    def __call__(self, x) -> TorusPoint:
        if len(x) != self.dim:
            raise TorusError("dimension mismatch")
        return TorusPoint(s * frac(c) + t for s, c, t in zip(self.signs, x, self.shift))

    def apply_coords(self, values: Sequence, coords: Sequence[int]) -> tuple[Fraction, ...]:
        """Image of a partial point living on ``coords`` (axes are preserved)."""
        return tuple(mod1(self.signs[i] * frac(v) + self.shift[i]) for v, i in zip(values, coords))

    def inverse(self) -> "AffineMap":
        return AffineMap(self.signs, [-s * t for s, t in zip(self.signs, self.shift)])

    def is_identity(self) -> bool:
        return all(s == 1 for s in self.signs) and not any(self.shift)

    def is_involution(self) -> bool:
        return compose(self, self).is_identity()

    def __mul__(self, other: "AffineMap") -> "AffineMap":
        return compose(self, other)

    def __str__(self):
        parts = []
        for s, t in zip(self.signs, self.shift):
            term = "x" if s == 1 else "-x"
            parts.append(term if not t else f"{fmt(t)}{'+' if s == 1 else ''}{term}")
        return "(" + ", ".join(parts) + ")"


def compose(f: AffineMap, g: AffineMap) -> AffineMap:
    """f o g."""
    if f.dim != g.dim:
        raise TorusError(f"dimension mismatch: {f.dim} vs {g.dim}")
    return AffineMap(
        [a * b for a, b in zip(f.signs, g.signs)],
        [a * t + s for a, t, s in zip(f.signs, g.shift, f.shift)],
    )


@dataclass(frozen=True, order=True)
class Slab:
    """Coordinate subtorus {x : x_i = value_i for i in fixed}."""

    dim: int
    fixed: tuple[tuple[int, Fraction], ...]

    def __init__(self, dim: int, fixed):
        items = fixed.items() if isinstance(fixed, dict) else fixed
        norm = tuple(sorted((int(i), mod1(frac(v))) for i, v in items))
        if any(not 0 <= i < dim for i, _ in norm):
            raise TorusError("slab coordinate out of range")
        if len({i for i, _ in norm}) != len(norm):
            raise TorusError("slab fixes a coordinate twice")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "fixed", norm)

    @property
    def fixed_coords(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.fixed)

    @property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(v for _, v in self.fixed)

    @property
    def free(self) -> tuple[int, ...]:
        fc = set(self.fixed_coords)
        return tuple(i for i in range(self.dim) if i not in fc)

    @property
    def free_dim(self) -> int:
        return self.dim - len(self.fixed)

    def value_map(self) -> dict[int, Fraction]:
        return dict(self.fixed)

    def contains(self, x) -> bool:
        return all(mod1(frac(x[i])) == v for i, v in self.fixed)

    def sample_point(self, free_values: Sequence | None = None) -> TorusPoint:
        vals = self.value_map()
        free = self.free
        if free_values is None:
            free_values = [Fraction(1, 3)] * len(free)
        it = iter(free_values)
        return TorusPoint(vals[i] if i in vals else next(it) for i in range(self.dim))

    def __str__(self):
        if not self.fixed:
            return "{T^%d}" % self.dim
        return "{" + ", ".join(f"x{i + 1}={fmt(v)}" for i, v in self.fixed) + "}"


@dataclass(frozen=True)
class FixedLocus:
    dim: int
    components: tuple[Slab, ...] = field(default=())

    @property
    def empty(self) -> bool:
        return not self.components

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    @property
    def component_dim(self) -> int | None:
        return self.components[0].free_dim if self.components else None


def fixed_locus(f: AffineMap) -> FixedLocus:
    """All fixed points of ``f`` as a disjoint union of slabs.

    Per coordinate: sign +1 with nonzero shift has no solution; sign +1 with
    zero shift leaves the coordinate free; sign -1 forces 2x = shift, i.e.
    x in {shift/2, shift/2 + 1/2}.
    """
    choices: list[tuple[int, tuple[Fraction, ...]]] = []
    for i, (s, t) in enumerate(zip(f.signs, f.shift)):
        if s == 1:
            if t:
                return FixedLocus(f.dim, ())
            continue
        choices.append((i, (mod1(t / 2), mod1(t / 2 + Fraction(1, 2)))))
    coords = [i for i, _ in choices]
    comps = [Slab(f.dim, zip(coords, vals)) for vals in itertools.product(*(c for _, c in choices))]
    return FixedLocus(f.dim, tuple(sorted(comps)))


def map_slab(f: AffineMap, s: Slab) -> Slab:
    if f.dim != s.dim:
        raise TorusError("dimension mismatch")
    return Slab(s.dim, [(i, f.signs[i] * v + f.shift[i]) for i, v in s.fixed])


def intersect_slabs(a: Slab, b: Slab) -> Slab | None:
    if a.dim != b.dim:
        raise TorusError("dimension mismatch")
    vals = a.value_map()
    for i, v in b.fixed:
        if i in vals and vals[i] != v:
            return None
        vals[i] = v
    return Slab(a.dim, vals)


class GroupBoundExceeded(TorusError):
    pass


@dataclass(frozen=True)
class FiniteGroup:
    elements: tuple[AffineMap, ...]
    table: tuple[tuple[int, ...], ...]
    generator_indices: tuple[int, ...]
    names: tuple[str, ...]

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def dim(self) -> int:
        return self.elements[0].dim

    def index(self, f: AffineMap) -> int:
        try:
            return self._lookup[f]
        except KeyError:
            raise TorusError(f"{f} is not in the group") from None

    @property
    def _lookup(self) -> dict[AffineMap, int]:
        cache = self.__dict__.get("_lookup_cache")
        if cache is None:
            cache = {e: i for i, e in enumerate(self.elements)}
            object.__setattr__(self, "_lookup_cache", cache)
        return cache

    def inverse_index(self, i: int) -> int:
        return self.table[i].index(0)

    def is_abelian(self) -> bool:
        n = self.order
        return all(self.table[i][j] == self.table[j][i] for i in range(n) for j in range(i + 1, n))

    def is_elementary_abelian_2(self) -> bool:
        return self.is_abelian() and all(self.table[i][i] == 0 for i in range(self.order))

    def elementary_rank(self) -> int | None:
        """k such that the group is (Z_2)^k, or None."""
        if not self.is_elementary_abelian_2():
            return None
        return self.order.bit_length() - 1

    def type_name(self) -> str | None:
        k = self.elementary_rank()
        return None if k is None else f"Z2^{k}"

    def subgroup_indices(self, generators: Sequence[int]) -> list[int]:
        """Indices of the subgroup generated by the given element indices."""
        seen = [0]
        seen_set = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for a in frontier:
                for g in generators:
                    c = self.table[a][g]
                    if c not in seen_set:
                        seen_set.add(c)
                        seen.append(c)
                        nxt.append(c)
            frontier = nxt
        return seen

    def element_by_name(self, name: str) -> int:
        """Resolve "alpha*beta"-style words (or "id") to an element index."""
        name = name.strip()
        if name in ("id", "1", "e"):
            return 0
        gens = dict(zip((self.names[i] for i in self.generator_indices), self.generator_indices))
        idx = 0
        for part in name.split("*"):
            part = part.strip()
            if part not in gens:
                raise TorusError(f"unknown generator {part!r} in element {name!r}")
            idx = self.table[idx][gens[part]]
        return idx


def group_closure(generators: Sequence[AffineMap], names: Sequence[str] | None = None,
                  bound: int = DEFAULT_GROUP_BOUND) -> FiniteGroup:
    """Close ``generators`` under composition.

    Elements are found breadth first, right-multiplying by generators in the
    given order, and each is named by the word that first produced it.
    """
    if not generators:
        raise TorusError("need at least one generator")
    dim = generators[0].dim
    if any(g.dim != dim for g in generators):
        raise TorusError("generators have different dimensions")
    if names is None:
        names = [f"g{i + 1}" for i in range(len(generators))]
    ident = AffineMap.identity(dim)
    elements = [ident]
    words = ["id"]
    index = {ident: 0}
    frontier = [0]
    while frontier:
        nxt = []
        for a in frontier:
            for g, gname in zip(generators, names):
                c = compose(elements[a], g)
                if c not in index:
                    if len(elements) >= bound:
                        raise GroupBoundExceeded(
                            f"group closure exceeded {bound} elements")
                    index[c] = len(elements)
                    elements.append(c)
                    words.append(gname if a == 0 else f"{words[a]}*{gname}")
                    nxt.append(index[c])
        frontier = nxt
    table = tuple(tuple(index[compose(a, b)] for b in elements) for a in elements)
    gen_idx = tuple(index[g] for g in generators)
    words = list(words)
    # generators keep their own names even if equal to an earlier word
    for gi, gname in zip(gen_idx, names):
        if gi != 0 and "*" in words[gi]:
            words[gi] = gname
    return FiniteGroup(tuple(elements), table, gen_idx, tuple(words))


def component_orbits(group: FiniteGroup, components: Sequence[Slab],
                     element_indices: Sequence[int] | None = None) -> list[list[int]]:
    """Orbit partition of ``components`` under the group (or a subset of its elements).

    Raises TorusError naming the element and component when the list is not
    stable under the action.
    """
    if element_indices is None:
        element_indices = range(group.order)
    pos = {c: i for i, c in enumerate(components)}
    images: list[list[int]] = []
    for e in element_indices:
        f = group.elements[e]
        row = []
        for c in components:
            img = map_slab(f, c)
            if img not in pos:
                raise TorusError(
                    f"component list not stable: {group.names[e]} maps {c} to {img}")
            row.append(pos[img])
        images.append(row)
    parent = list(range(len(components)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for row in images:
        for a, b in enumerate(row):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    orbits: dict[int, list[int]] = {}
    for i in range(len(components)):
        orbits.setdefault(find(i), []).append(i)
    return sorted(orbits.values())


def orbit_size_histogram(orbits: Sequence[Sequence[int]]) -> dict[int, int]:
    hist: dict[int, int] = {}
    for o in orbits:
        hist[len(o)] = hist.get(len(o), 0) + 1
    return dict(sorted(hist.items()))
