"""Declarative F-structure specifications and the spec-file format.

A spec file is a JSON document.  Coordinates are 1-based, every rational is a
"p/q" string and every tube radius is given in units of epsilon (the run
configuration supplies epsilon).  ``parse_spec`` validates the document and
rejects unknown keys; ``serialize_spec`` writes the normalized form, so a
parsed bundled spec re-serializes byte for byte.

``build_model`` turns a parsed spec into computational objects: the deck
group, concrete regions and action primitives.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

from .actions import ChartAction, PairRotation, Tagging, TranslationFlow
from .regions import Region, TubeConstraint
from .torus import (AffineMap, FiniteGroup, Slab, TorusError, fixed_locus, fmt, frac,
                    group_closure)

FORMAT = "kummerf-spec/1"
DEFAULT_EPSILON = Fraction(1, 16)


class SpecError(ValueError):
    """Malformed or unresolvable spec; ``where`` names the offending location."""

    def __init__(self, message: str, where: str = ""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


# ---------------------------------------------------------------------------
# file-level data (mirrors the JSON document)


@dataclass
class ConstraintSpec:
    coords: list[int] = field(default_factory=list)
    centers: list[list[str]] = field(default_factory=list)  # per-coordinate value lists
    radius: str = "1"
    sense: str = "inside"
    outside_of: str | None = None  # derived: complement of closure of a resolution tube
    scale: str | None = None


@dataclass
class RegionSpec:
    constraints: list[ConstraintSpec] = field(default_factory=list)
    punctured: bool = False


@dataclass
class ActionSpec:
    type: str
    coords: list[int] | None = None
    weights: list[list[int]] | list[int] | None = None
    pair: list[int] | None = None
    pairing: list[list[int]] | None = None
    centers: list[list[str]] | None = None
    tags: list[dict] | None = None
    name: str | None = None


@dataclass
class ChartSpec:
    id: str
    region: RegionSpec
    actions: list[ActionSpec]
    covering: str = "trivial"
    subgroup: list[str] | None = None
    psi: dict[str, list[int]] | None = None
    element: str | None = None  # resolution charts only
    model: str | None = None  # free-text descriptor of the glued-in local model


@dataclass
class GeneratorSpec:
    name: str
    signs: list[int]
    shift: list[str]


@dataclass
class StructureSpec:
    name: str
    torus_dim: int
    generators: list[GeneratorSpec]
    charts: list[ChartSpec]
    resolution_charts: list[ChartSpec]
    claims: dict[str, Any] = field(default_factory=dict)
    description: str = ""
    mutation: dict[str, Any] | None = None


_TOP_KEYS = {"format", "name", "description", "torus_dim", "generators", "charts",
             "resolution_charts", "claims", "mutation"}
_CLAIM_KEYS = {"group_order", "group_type", "stated_group_type", "fixed", "fixed_equals_intersection",
               "orbits", "intersections", "disjoint", "covered", "polarized"}


def _check_keys(obj, allowed, where, required=()):
    if not isinstance(obj, dict):
        raise SpecError("expected an object", where)
    unknown = set(obj) - set(allowed)
    if unknown:
        raise SpecError(f"unknown key(s) {sorted(unknown)}", where)
    for k in required:
        if k not in obj:
            raise SpecError(f"missing key {k!r}", where)


def _rat(v, where) -> str:
    if not isinstance(v, str):
        raise SpecError(f"rationals must be written as \"p/q\" strings, got {v!r}", where)
    try:
        return fmt(frac(v))
    except TorusError as exc:
        raise SpecError(str(exc), where) from None


def _coord(v, n, where) -> int:
    if not isinstance(v, int) or isinstance(v, bool) or not 1 <= v <= n:
        raise SpecError(f"coordinate {v!r} not in 1..{n}", where)
    return v


def _parse_constraint(obj, n, where) -> ConstraintSpec:
    if "outside_of" in obj:
        _check_keys(obj, {"outside_of", "scale"}, where, ("outside_of",))
        return ConstraintSpec(outside_of=str(obj["outside_of"]),
                              scale=_rat(obj.get("scale", "1"), where + ".scale"))
    _check_keys(obj, {"coords", "centers", "radius", "sense"}, where, ("coords", "centers", "radius"))
    coords = [_coord(c, n, where + ".coords") for c in obj["coords"]]
    centers = obj["centers"]
    if not isinstance(centers, list) or len(centers) != len(coords):
        raise SpecError("centers must give one value list per coordinate", where)
    centers = [[_rat(v, f"{where}.centers") for v in vals] for vals in centers]
    sense = obj.get("sense", "inside")
    if sense not in ("inside", "outside"):
        raise SpecError(f"sense must be inside/outside, got {sense!r}", where)
    return ConstraintSpec(coords, centers, _rat(obj["radius"], where + ".radius"), sense)


def _parse_region(obj, n, where) -> RegionSpec:
    _check_keys(obj, {"constraints", "punctured"}, where)
    cons = [_parse_constraint(c, n, f"{where}.constraints[{k}]")
            for k, c in enumerate(obj.get("constraints", []))]
    return RegionSpec(cons, bool(obj.get("punctured", False)))


def _parse_tags(tags, n, where):
    if tags is None:
        return None
    out = []
    for k, t in enumerate(tags):
        _check_keys(t, {"coord", "map"}, f"{where}[{k}]", ("coord", "map"))
        _coord(t["coord"], n, f"{where}[{k}].coord")
        m = {_rat(key, f"{where}[{k}].map"): int(v) for key, v in t["map"].items()}
        if any(v not in (1, -1) for v in m.values()):
            raise SpecError("tag values must be 1 or -1", f"{where}[{k}]")
        out.append({"coord": t["coord"], "map": m})
    return out


def _parse_action(obj, n, where) -> ActionSpec:
    kind = obj.get("type") if isinstance(obj, dict) else None
    if kind == "flow":
        _check_keys(obj, {"type", "coords", "weights", "tags", "name"}, where)
        if ("coords" in obj) == ("weights" in obj):
            raise SpecError("flow needs exactly one of coords/weights", where)
        coords = [_coord(c, n, where) for c in obj["coords"]] if "coords" in obj else None
        weights = obj.get("weights")
        if weights is not None and (len(weights) != n or any(len(r) != len(weights[0]) for r in weights)):
            raise SpecError("flow weights must be an n x k integer matrix", where)
        return ActionSpec("flow", coords=coords, weights=weights,
                          tags=_parse_tags(obj.get("tags"), n, where + ".tags"), name=obj.get("name"))
    if kind == "rotation":
        _check_keys(obj, {"type", "pair", "centers", "tags", "name"}, where, ("pair",))
        pair = [_coord(c, n, where + ".pair") for c in obj["pair"]]
        if len(pair) != 2 or pair[0] == pair[1]:
            raise SpecError("rotation pair must be two distinct coordinates", where)
        centers = obj.get("centers")
        if centers is not None:
            centers = [[_rat(v, where + ".centers") for v in c] for c in centers]
        return ActionSpec("rotation", pair=pair, centers=centers,
                          tags=_parse_tags(obj.get("tags"), n, where + ".tags"), name=obj.get("name"))
    if kind == "chart":
        _check_keys(obj, {"type", "pairing", "weights", "tags", "name"}, where, ("pairing", "weights"))
        pairing = [[_coord(c, n, where + ".pairing") for c in p] for p in obj["pairing"]]
        return ActionSpec("chart", pairing=pairing, weights=[int(w) for w in obj["weights"]],
                          tags=_parse_tags(obj.get("tags"), n, where + ".tags"), name=obj.get("name"))
    raise SpecError(f"unknown action type {kind!r}", where)


def _parse_chart(obj, n, where, resolution: bool) -> ChartSpec:
    if resolution:
        _check_keys(obj, {"id", "element", "model", "region", "actions"}, where,
                    ("id", "element", "region"))
    else:
        _check_keys(obj, {"id", "region", "actions", "covering", "subgroup", "psi"}, where,
                    ("id", "region"))
    cid = obj["id"]
    where = f"{where}({cid})"
    region = _parse_region(obj["region"], n, where + ".region")
    actions = [_parse_action(a, n, f"{where}.actions[{k}]") for k, a in enumerate(obj.get("actions", []))]
    covering = "trivial" if resolution else obj.get("covering", "trivial")
    if covering not in ("trivial", "quotient"):
        raise SpecError(f"covering must be trivial/quotient, got {covering!r}", where)
    psi = obj.get("psi")
    if covering == "quotient" and psi is None:
        raise SpecError("quotient charts need psi", where)
    if covering == "trivial" and psi is not None:
        raise SpecError("psi is only allowed on quotient charts", where)
    return ChartSpec(cid, region, actions, covering, obj.get("subgroup"), psi,
                     obj.get("element") if resolution else None,
                     obj.get("model") if resolution else None)


def parse_spec(doc: dict | str) -> StructureSpec:
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from None
    _check_keys(doc, _TOP_KEYS, "spec", ("format", "name", "torus_dim", "generators", "charts"))
    if doc["format"] != FORMAT:
        raise SpecError(f"unsupported format {doc['format']!r}", "spec.format")
    n = doc["torus_dim"]
    if not isinstance(n, int) or n < 1:
        raise SpecError("torus_dim must be a positive integer", "spec.torus_dim")
    gens = []
    for k, g in enumerate(doc["generators"]):
        where = f"generators[{k}]"
        _check_keys(g, {"name", "signs", "shift", "linear"}, where, ("name",))
        if ("signs" in g) == ("linear" in g):
            raise SpecError("give exactly one of signs/linear", where)
        shift = [_rat(v, where + ".shift") for v in g.get("shift", ["0"] * n)]
        try:
            if "linear" in g:
                f = AffineMap.from_linear(g["linear"], shift)
            else:
                f = AffineMap(g["signs"], shift)
        except TorusError as exc:
            raise SpecError(str(exc), where) from None
        if f.dim != n:
            raise SpecError(f"generator has dimension {f.dim}, torus has {n}", where)
        gens.append(GeneratorSpec(g["name"], list(f.signs), shift))
    names = [g.name for g in gens]
    if len(set(names)) != len(names):
        raise SpecError("duplicate generator names", "generators")
    charts = [_parse_chart(c, n, f"charts[{k}]", False) for k, c in enumerate(doc["charts"])]
    res = [_parse_chart(c, n, f"resolution_charts[{k}]", True)
           for k, c in enumerate(doc.get("resolution_charts", []))]
    ids = [c.id for c in charts + res]
    if len(set(ids)) != len(ids):
        raise SpecError("duplicate chart ids", "charts")
    claims = doc.get("claims", {})
    _check_keys(claims, _CLAIM_KEYS, "claims")
    spec = StructureSpec(doc["name"], n, gens, charts, res, claims, doc.get("description", ""),
                         doc.get("mutation"))
    _check_refs(spec)
    return spec


def _check_refs(spec: StructureSpec):
    gnames = {g.name for g in spec.generators}
    res_ids = {c.id for c in spec.resolution_charts}

    def word_ok(word):
        return word in ("id",) or all(p.strip() in gnames for p in word.split("*"))

    for c in spec.charts + spec.resolution_charts:
        for name in (c.subgroup or []):
            if name not in gnames:
                raise SpecError(f"unknown generator {name!r}", f"chart {c.id}.subgroup")
        for name in (c.psi or {}):
            if name not in gnames:
                raise SpecError(f"unknown generator {name!r}", f"chart {c.id}.psi")
        if c.element is not None and not word_ok(c.element):
            raise SpecError(f"unknown element {c.element!r}", f"chart {c.id}.element")
        for k, con in enumerate(c.region.constraints):
            if con.outside_of is not None and con.outside_of not in res_ids:
                raise SpecError(f"unknown resolution chart {con.outside_of!r}",
                                f"chart {c.id}.region.constraints[{k}]")
    cl = spec.claims
    for name in cl.get("fixed", {}):
        if not word_ok(name):
            raise SpecError(f"unknown element {name!r}", "claims.fixed")
    for group in cl.get("disjoint", []):
        for cid in group:
            if cid not in {c.id for c in spec.charts + spec.resolution_charts}:
                raise SpecError(f"unknown chart {cid!r}", "claims.disjoint")


def load_spec(path) -> StructureSpec:
    text = Path(path).read_text(encoding="utf-8")
    return parse_spec(text)


# ---------------------------------------------------------------------------
# serialization


def _ser_constraint(c: ConstraintSpec) -> dict:
    if c.outside_of is not None:
        return {"outside_of": c.outside_of, "scale": c.scale}
    return {"coords": c.coords, "centers": c.centers, "radius": c.radius, "sense": c.sense}


def _ser_action(a: ActionSpec) -> dict:
    d: dict[str, Any] = {"type": a.type}
    if a.name is not None:
        d["name"] = a.name
    if a.type == "flow":
        if a.coords is not None:
            d["coords"] = a.coords
        else:
            d["weights"] = a.weights
    elif a.type == "rotation":
        d["pair"] = a.pair
        if a.centers is not None:
            d["centers"] = a.centers
    else:
        d["pairing"] = a.pairing
        d["weights"] = a.weights
    if a.tags is not None:
        d["tags"] = [{"coord": t["coord"], "map": t["map"]} for t in a.tags]
    return d


def _ser_chart(c: ChartSpec, resolution: bool) -> dict:
    d: dict[str, Any] = {"id": c.id}
    if resolution:
        d["element"] = c.element
        if c.model is not None:
            d["model"] = c.model
    else:
        d["covering"] = c.covering
        if c.subgroup is not None:
            d["subgroup"] = c.subgroup
    d["region"] = {"constraints": [_ser_constraint(x) for x in c.region.constraints],
                   "punctured": c.region.punctured}
    d["actions"] = [_ser_action(a) for a in c.actions]
    if c.psi is not None:
        d["psi"] = c.psi
    return d


def spec_to_dict(spec: StructureSpec) -> dict:
    d: dict[str, Any] = {"format": FORMAT, "name": spec.name}
    if spec.description:
        d["description"] = spec.description
    d["torus_dim"] = spec.torus_dim
    d["generators"] = [{"name": g.name, "signs": g.signs, "shift": g.shift} for g in spec.generators]
    d["charts"] = [_ser_chart(c, False) for c in spec.charts]
    d["resolution_charts"] = [_ser_chart(c, True) for c in spec.resolution_charts]
    d["claims"] = spec.claims
    if spec.mutation is not None:
        d["mutation"] = spec.mutation
    return d


def serialize_spec(spec: StructureSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# computational model


@dataclass
class ChartModel:
    id: str
    kind: str  # "chart" | "resolution"
    region: Region
    derived: tuple[bool, ...]  # per constraint: came from an outside_of reference
    covering: str
    group_elements: list[int]  # indices into the deck group
    subgroup_generators: list[int]
    primitives: list
    columns: list[tuple[int, int]]  # (start, k) per primitive
    psi: dict[int, list[int]] | None  # element index -> diagonal, quotient charts only
    psi_generators: dict[int, list[int]] | None
    element: int | None = None
    component_constraint: TubeConstraint | None = None

    @property
    def k(self) -> int:
        return sum(k for _, k in self.columns)

    def components(self) -> list[dict[int, Fraction]]:
        c = self.component_constraint
        if c is None:
            return []
        return [dict(zip(c.coords, ctr)) for ctr in c.sorted_centers()]

    def component_of(self, x) -> dict[int, Fraction] | None:
        c = self.component_constraint
        if c is None:
            return None
        return dict(zip(c.coords, c.nearest_center(x)))


@dataclass
class Model:
    spec: StructureSpec
    epsilon: Fraction
    group: FiniteGroup
    charts: list[ChartModel]
    singular: list[Slab]

    @property
    def dim(self) -> int:
        return self.spec.torus_dim

    def chart(self, cid: str) -> ChartModel:
        for c in self.charts:
            if c.id == cid:
                return c
        raise KeyError(cid)


def _centers_product(values) -> list[tuple[Fraction, ...]]:
    return list(itertools.product(*[[frac(v) for v in vals] for vals in values]))


def _build_constraint(c: ConstraintSpec, eps: Fraction) -> TubeConstraint:
    return TubeConstraint([i - 1 for i in c.coords], _centers_product(c.centers),
                          frac(c.radius) * eps, c.sense == "inside")


def _tagging(tags):
    if tags is None:
        return None
    return Tagging([(t["coord"] - 1, t["map"]) for t in tags])


def _project_centers(con: TubeConstraint | None, coords, where):
    if con is None or not set(coords) <= set(con.coords):
        raise SpecError("cannot derive action centers: no inside constraint covering "
                        f"coordinates {[c + 1 for c in coords]}", where)
    idx = [con.coords.index(c) for c in coords]
    return {tuple(ctr[k] for k in idx) for ctr in con.centers}


def _build_action(a: ActionSpec, n: int, comp: TubeConstraint | None, where: str):
    tags = _tagging(a.tags)
    name = a.name or ""
    if a.type == "flow":
        if a.coords is not None:
            return TranslationFlow.axes(n, [c - 1 for c in a.coords], tags, name)
        return TranslationFlow(n, tuple(tuple(r) for r in a.weights), tags, name)
    if a.type == "rotation":
        pair = tuple(c - 1 for c in a.pair)
        if a.centers is not None:
            centers = {tuple(frac(v) for v in c) for c in a.centers}
        else:
            centers = _project_centers(comp, pair, where)
        return PairRotation(n, pair, frozenset(centers), tags, name)
    pairing = tuple(tuple(c - 1 for c in p) for p in a.pairing)
    coords = [c for p in pairing for c in p]
    return ChartAction(n, pairing, tuple(a.weights), frozenset(_project_centers(comp, coords, where)),
                       tags, name)


def build_model(spec: StructureSpec, epsilon=DEFAULT_EPSILON, group_bound: int = 4096) -> Model:
    """Resolve a parsed spec into a deck group, concrete regions and primitives.

    Raises SpecError for unresolvable references and lets TorusError escape
    from group closure (the verifier reports it as a P1 failure).
    """
    eps = frac(epsilon)
    n = spec.torus_dim
    gens = [AffineMap(g.signs, g.shift) for g in spec.generators]
    G = group_closure(gens, [g.name for g in spec.generators], bound=group_bound)
    singular = sorted({s for e in G.elements[1:] for s in fixed_locus(e).components})
    gidx = {g.name: G.generator_indices[k] for k, g in enumerate(spec.generators)}

    # resolution tubes first: charts may reference them
    res_regions: dict[str, list[TubeConstraint]] = {}
    for c in spec.resolution_charts:
        cons = []
        for k, con in enumerate(c.region.constraints):
            if con.outside_of is not None:
                raise SpecError("resolution charts cannot reference other tubes",
                                f"resolution chart {c.id}.region.constraints[{k}]")
            cons.append(_build_constraint(con, eps))
        res_regions[c.id] = cons

    charts = []
    for kind, cspecs in (("chart", spec.charts), ("resolution", spec.resolution_charts)):
        for c in cspecs:
            cons, derived = [], []
            for con in c.region.constraints:
                if con.outside_of is not None:
                    inner = [t for t in res_regions[con.outside_of] if t.inside]
                    if not inner:
                        raise SpecError(f"{con.outside_of} has no tube to complement", f"chart {c.id}")
                    for t in inner:
                        cons.append(t.negated_closure(frac(con.scale)))
                        derived.append(True)
                else:
                    cons.append(_build_constraint(con, eps))
                    derived.append(False)
            region = Region(n, cons, singular if c.region.punctured else ())
            comp = next((t for t in cons if t.inside), None)
            prims, columns, start = [], [], 0
            for k, a in enumerate(c.actions):
                p = _build_action(a, n, comp, f"chart {c.id}.actions[{k}]")
                prims.append(p)
                columns.append((start, p.k))
                start += p.k
            if c.subgroup is not None:
                sub_gens = [gidx[name] for name in c.subgroup]
            else:
                sub_gens = list(G.generator_indices)
            elements = G.subgroup_indices(sub_gens)
            psi = psi_gen = None
            if c.covering == "quotient":
                psi_gen = {}
                for name, diag in c.psi.items():
                    if len(diag) != start or any(v not in (1, -1) for v in diag):
                        raise SpecError(f"psi({name}) must be {start} entries of +-1", f"chart {c.id}.psi")
                    psi_gen[gidx[name]] = list(diag)
                missing = [G.names[g] for g in sub_gens if g not in psi_gen]
                if missing:
                    raise SpecError(f"psi missing for {missing}", f"chart {c.id}.psi")
                psi = _extend_psi(G, sub_gens, psi_gen, start)
            element = None
            if kind == "resolution":
                try:
                    element = G.element_by_name(c.element)
                except TorusError as exc:
                    raise SpecError(str(exc), f"resolution chart {c.id}") from None
            charts.append(ChartModel(c.id, kind, region, tuple(derived), c.covering, elements, sub_gens,
                                     prims, columns, psi, psi_gen, element, comp))
    return Model(spec, eps, G, charts, singular)


def _extend_psi(G: FiniteGroup, sub_gens, psi_gen, k) -> dict[int, list[int]]:
    """Extend Psi from generators along a breadth-first search of the subgroup.

    The result is only a candidate: the verifier checks the homomorphism
    property on the full composition table.
    """
    psi = {0: [1] * k}
    frontier = [0]
    while frontier:
        nxt = []
        for a in frontier:
            for g in sub_gens:
                c = G.table[a][g]
                if c not in psi:
                    psi[c] = [x * y for x, y in zip(psi[a], psi_gen[g])]
                    nxt.append(c)
        frontier = nxt
    return psi
