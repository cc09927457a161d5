"""Torus-action primitives on chart covers and their symbolic checks.

Three primitive kinds are supported:

* ``TranslationFlow``: t -> x + M t for an integer n x k weight matrix M.
* ``PairRotation``: the circle rotating one coordinate pair about a finite set
  of centers (one per connected component of its domain).
* ``ChartAction``: a declared circle action diag(e^{i w1 t}, e^{i w2 t}) on a
  resolution chart, given by a complex pairing of four local coordinates.

Any primitive may carry a ``Tagging``: a +-1 sign per connected component of
the chart, so that on some components the action runs backwards.  Tags never
change commutation or orbit dimension; they enter only the equivariance rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .torus import AffineMap, TorusError, frac, mod1, signed_offset


class ActionError(TorusError):
    pass


@dataclass(frozen=True)
class Tagging:
    """Component sign = product over factors of lookup[center value on coord]."""

    factors: tuple[tuple[int, tuple[tuple[Fraction, int], ...]], ...]

    def __init__(self, factors):
        norm = []
        for coord, table in factors:
            items = table.items() if isinstance(table, dict) else table
            tab = tuple(sorted((mod1(frac(v)), int(s)) for v, s in items))
            if any(s not in (1, -1) for _, s in tab):
                raise ActionError("tag signs must be +1/-1")
            norm.append((int(coord), tab))
        object.__setattr__(self, "factors", tuple(norm))

    @property
    def coords(self) -> tuple[int, ...]:
        return tuple(c for c, _ in self.factors)

    def sign(self, center: dict[int, Fraction]) -> int | None:
        """Sign for a component center (coordinate -> value); None if undefined."""
        s = 1
        for coord, table in self.factors:
            if coord not in center:
                return None
            lookup = dict(table)
            v = mod1(frac(center[coord]))
            if v not in lookup:
                return None
            s *= lookup[v]
        return s


@dataclass(frozen=True)
class TranslationFlow:
    dim: int
    weights: tuple[tuple[int, ...], ...]  # n rows, k columns
    tags: Tagging | None = None
    name: str = ""

    def __post_init__(self):
        w = tuple(tuple(int(v) for v in row) for row in self.weights)
        if len(w) != self.dim or not w or not w[0]:
            raise ActionError("weight matrix must be n x k with k >= 1")
        if len({len(r) for r in w}) != 1:
            raise ActionError("ragged weight matrix")
        object.__setattr__(self, "weights", w)

    @classmethod
    def axes(cls, dim: int, coords: Sequence[int], tags=None, name="") -> "TranslationFlow":
        """Independent unit-speed circles on the given coordinates (A_i x A_j ...)."""
        rows = [[1 if i == c else 0 for c in coords] for i in range(dim)]
        return cls(dim, tuple(map(tuple, rows)), tags, name)

    @property
    def k(self) -> int:
        return len(self.weights[0])

    @property
    def support(self) -> set[int]:
        return {i for i, row in enumerate(self.weights) if any(row)}

    def generators_at(self, x) -> list[list[Fraction]]:
        return [[Fraction(self.weights[i][j]) for i in range(self.dim)] for j in range(self.k)]


@dataclass(frozen=True)
class PairRotation:
    dim: int
    pair: tuple[int, int]
    centers: frozenset[tuple[Fraction, Fraction]]
    tags: Tagging | None = None
    name: str = ""

    def __post_init__(self):
        i, j = (int(v) for v in self.pair)
        if i == j or not (0 <= i < self.dim and 0 <= j < self.dim):
            raise ActionError(f"bad rotation pair {self.pair}")
        object.__setattr__(self, "pair", (i, j))
        cs = frozenset((mod1(frac(a)), mod1(frac(b))) for a, b in self.centers)
        if not cs:
            raise ActionError("rotation needs a center")
        object.__setattr__(self, "centers", cs)

    k = 1

    @property
    def support(self) -> set[int]:
        return set(self.pair)

    def nearest_center(self, x) -> tuple[Fraction, Fraction]:
        i, j = self.pair
        return min(sorted(self.centers),
                   key=lambda c: signed_offset(frac(x[i]), c[0]) ** 2 + signed_offset(frac(x[j]), c[1]) ** 2)

    def generators_at(self, x) -> list[list[Fraction]]:
        i, j = self.pair
        ci, cj = self.nearest_center(x)
        di, dj = signed_offset(frac(x[i]), ci), signed_offset(frac(x[j]), cj)
        v = [Fraction(0)] * self.dim
        v[i], v[j] = -dj, di
        return [v]

    def conjugation_sign(self, f: AffineMap) -> int:
        i, j = self.pair
        return f.signs[i] * f.signs[j]


@dataclass(frozen=True)
class ChartAction:
    dim: int
    pairing: tuple[tuple[int, int], tuple[int, int]]
    weights: tuple[int, int]
    centers: frozenset[tuple[Fraction, ...]]  # on coords(), in that order
    tags: Tagging | None = None
    name: str = ""

    def __post_init__(self):
        pairing = tuple((int(a), int(b)) for a, b in self.pairing)
        flat = [c for p in pairing for c in p]
        if len(pairing) != 2 or len(set(flat)) != 4 or any(not 0 <= c < self.dim for c in flat):
            raise ActionError(f"chart action needs two disjoint coordinate pairs, got {self.pairing}")
        object.__setattr__(self, "pairing", pairing)
        w = tuple(int(v) for v in self.weights)
        if len(w) != 2:
            raise ActionError("chart action needs two weights")
        object.__setattr__(self, "weights", w)
        cs = frozenset(tuple(mod1(frac(v)) for v in c) for c in self.centers)
        if any(len(c) != 4 for c in cs) or not cs:
            raise ActionError("chart action centers must list the four paired coordinates")
        object.__setattr__(self, "centers", cs)

    k = 1

    def coords(self) -> tuple[int, ...]:
        return tuple(c for p in self.pairing for c in p)

    @property
    def support(self) -> set[int]:
        return {c for p, w in zip(self.pairing, self.weights) if w for c in p}

    def nearest_center(self, x) -> dict[int, Fraction]:
        coords = self.coords()
        best = min(sorted(self.centers), key=lambda c: sum(
            signed_offset(frac(x[i]), v) ** 2 for i, v in zip(coords, c)))
        return dict(zip(coords, best))

    def generators_at(self, x) -> list[list[Fraction]]:
        ctr = self.nearest_center(x)
        v = [Fraction(0)] * self.dim
        for (a, b), w in zip(self.pairing, self.weights):
            da, db = signed_offset(frac(x[a]), ctr[a]), signed_offset(frac(x[b]), ctr[b])
            v[a] += -w * db
            v[b] += w * da
        return [v]

    def conjugation_sign(self, f: AffineMap) -> int | None:
        """Common orientation factor of ``f`` on the weighted pairs, or None if they disagree."""
        signs = {f.signs[a] * f.signs[b] for (a, b), w in zip(self.pairing, self.weights) if w}
        return signs.pop() if len(signs) == 1 else None


Primitive = Union[TranslationFlow, PairRotation, ChartAction]


def equivariance_check(flow: TranslationFlow, gamma: AffineMap, psi_gamma: Sequence) -> bool:
    """diag(signs) M == M Psi(gamma) for a diagonal +-1 matrix Psi(gamma).

    ``psi_gamma`` is either the diagonal (length k) or a full k x k matrix.
    """
    if gamma.dim != flow.dim:
        raise ActionError("dimension mismatch")
    psi = _diag(psi_gamma, flow.k)
    return all(gamma.signs[i] * flow.weights[i][j] == flow.weights[i][j] * psi[j]
               for i in range(flow.dim) for j in range(flow.k))


def _diag(psi, k) -> list[int]:
    psi = list(psi)
    if psi and isinstance(psi[0], (list, tuple)):
        if any(psi[i][j] for i in range(k) for j in range(k) if i != j):
            raise ActionError("psi must be diagonal")
        psi = [psi[i][i] for i in range(k)]
    if len(psi) != k or any(p not in (1, -1) for p in psi):
        raise ActionError(f"psi must be a diagonal +-1 matrix of size {k}")
    return [int(p) for p in psi]


def commute_check(a: Primitive, b: Primitive) -> bool:
    """Symbolic commutation of two primitives on a common domain.

    Anything not settled by a rule is reported as non-commuting.
    """
    if a is b or a == b:
        return True
    if isinstance(b, TranslationFlow) and not isinstance(a, TranslationFlow):
        a, b = b, a
    if isinstance(a, ChartAction) and isinstance(b, PairRotation):
        a, b = b, a
    if isinstance(a, TranslationFlow):
        if isinstance(b, TranslationFlow):
            return True
        # a flow commutes with a rotation only if it does not move the rotated coordinates
        return not (a.support & b.support)
    if isinstance(a, PairRotation) and isinstance(b, PairRotation):
        if not set(a.pair) & set(b.pair):
            return True
        # rotations of one plane commute whatever their orientation, if they share centers
        return set(a.pair) == set(b.pair) and _oriented(a) == _oriented(b)
    if isinstance(a, PairRotation) and isinstance(b, ChartAction):
        if not set(a.pair) & set(b.coords()):
            return True
        if not any(set(a.pair) == set(p) and w for p, w in zip(b.pairing, b.weights)):
            return False
        i, j = a.pair
        proj = {frozenset({(i, c[i]), (j, c[j])}) for c in map(dict, _chart_centers(b))}
        # one component set must refine the other: a rotation about some other point of the plane clashes
        rot = _oriented(a)
        return proj <= rot or rot <= proj
    if isinstance(a, ChartAction) and isinstance(b, ChartAction):
        if not set(a.coords()) & set(b.coords()):
            return True
        pa = {frozenset(p) for p, w in zip(a.pairing, a.weights) if w}
        pb = {frozenset(p) for p, w in zip(b.pairing, b.weights) if w}
        return {frozenset(p) for p in a.pairing} == {frozenset(p) for p in b.pairing} and pa == pb \
            and _chart_centers(a) == _chart_centers(b)
    return False


def _oriented(r: PairRotation) -> frozenset:
    """Rotation centers as (coordinate, value) sets, independent of pair order."""
    i, j = r.pair
    return frozenset(frozenset({(i, c[0]), (j, c[1])}) for c in r.centers)


def _chart_centers(a: ChartAction) -> frozenset:
    return frozenset(frozenset(zip(a.coords(), c)) for c in a.centers)


def rank(vectors: Sequence[Sequence]) -> int:
    """Rank over the rationals, by exact elimination."""
    rows = [[Fraction(v) for v in row] for row in vectors if any(row)]
    r = 0
    ncols = len(rows[0]) if rows else 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][col]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                m = rows[i][col] / p
                rows[i] = [x - m * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def orbit_dim_at(primitives: Sequence[Primitive], x, valid=None) -> int:
    """Dimension of the joint orbit through ``x``.

    ``valid`` is an optional predicate; points outside it raise ActionError.
    """
    if valid is not None and not valid(x):
        raise ActionError(f"point {x} is outside the domain of the actions")
    vecs = []
    for p in primitives:
        vecs.extend(p.generators_at(x))
    return rank(vecs)


def finite_kernel_check(flow: TranslationFlow) -> bool:
    cols = [[flow.weights[i][j] for i in range(flow.dim)] for j in range(flow.k)]
    return rank(cols) == flow.k


def psi_is_homomorphism(table: Sequence[Sequence[int]], psi: dict[int, Sequence[int]],
                        elements: Sequence[int]) -> tuple[int, int] | None:
    """Check Psi(g h) = Psi(g) Psi(h) on the given element indices.

    Returns the first offending pair, or None.
    """
    for g in elements:
        for h in elements:
            gh = table[g][h]
            if gh not in psi:
                return g, h
            if [a * b for a, b in zip(psi[g], psi[h])] != list(psi[gh]):
                return g, h
    return None
