"""Single-field mutations of the bundled specs, each expected to break exactly one pass.

``python3 -m kummerf.mutations`` regenerates the fixture files under
``specs/fixtures``.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .structure import parse_spec, serialize_spec

SPEC_DIR = Path(__file__).parent / "specs"
FIXTURE_DIR = SPEC_DIR / "fixtures"
PRIMARY = ("k3", "j8", "g2", "cy3")


@dataclass(frozen=True)
class Mutation:
    spec: str
    suffix: str
    expect_fail: str
    description: str
    apply: Callable[[dict], None]

    @property
    def name(self) -> str:
        return f"{self.spec}_{self.suffix}"


def _chart(doc, cid):
    return next(c for c in doc["charts"] + doc.get("resolution_charts", []) if c["id"] == cid)


def _drop(cid):
    def f(doc):
        doc["charts"] = [c for c in doc["charts"] if c["id"] != cid]
    return f


def _psi(cid, gen, col, value):
    def f(doc):
        _chart(doc, cid)["psi"][gen][col] = value
    return f


def _shift(gen, coord, value):
    def f(doc):
        g = next(g for g in doc["generators"] if g["name"] == gen)
        g["shift"][coord - 1] = value
    return f


def _set_action(cid, k, key, value):
    def f(doc):
        _chart(doc, cid)["actions"][k][key] = value
    return f


def _replace_action(cid, k, action):
    def f(doc):
        _chart(doc, cid)["actions"][k] = action
    return f


def _radius(cid, k, value):
    def f(doc):
        _chart(doc, cid)["region"]["constraints"][k]["radius"] = value
    return f


def _scale(cid, k, value):
    def f(doc):
        _chart(doc, cid)["region"]["constraints"][k]["scale"] = value
    return f


MUTATIONS: list[Mutation] = [
    Mutation("k3", "drop_chart", "P3", "chart V4 removed", _drop("V4")),
    Mutation("k3", "bad_psi", "P5", "Psi(J) on chart U set to the identity", _psi("U", "J", 0, 1)),
    Mutation("k3", "bad_shift", "P2", "shift of J on x1 changed from 0 to 1/4", _shift("J", 1, "1/4")),
    Mutation("k3", "clash", "P6", "Hopf pairing on X changed to (x1,x2),(x3,x4)",
             _set_action("X", 0, "pairing", [[1, 2], [3, 4]])),
    Mutation("k3", "shrink", "P3", "radius of V1 shrunk from epsilon to epsilon/4", _radius("V1", 0, "1/4")),

    Mutation("j8", "drop_chart", "P3", "chart V13 removed", _drop("V13")),
    Mutation("j8", "bad_psi", "P5", "Psi(beta) on chart U set to the identity", _psi("U", "beta", 0, 1)),
    Mutation("j8", "bad_shift", "P2", "shift of beta on x8 changed from 0 to 1/4", _shift("beta", 8, "1/4")),
    Mutation("j8", "clash", "P6", "rotation of V13 moved to the pair (x6,x8), against A8 on U",
             _set_action("V13", 0, "pair", [6, 8])),
    Mutation("j8", "shrink", "P3", "radius of V13 shrunk from epsilon to epsilon/4", _radius("V13", 0, "1/4")),

    Mutation("g2", "drop_chart", "P3", "chart V removed", _drop("V")),
    Mutation("g2", "bad_psi", "P5", "Psi(gamma) on chart V set to the identity", _psi("V", "gamma", 1, 1)),
    Mutation("g2", "bad_shift", "P2", "shift of beta on x6 changed from 0 to 1/4", _shift("beta", 6, "1/4")),
    Mutation("g2", "clash", "P6", "action of U_alpha replaced by a rotation of (x6,x7), against A7 on V",
             _replace_action("U_alpha", 0, {
                 "type": "rotation", "name": "R67", "pair": [6, 7], "centers": [["0", "0"]],
                 "tags": [{"coord": 1, "map": {"0": 1, "1/2": -1}},
                          {"coord": 2, "map": {"0": 1, "1/2": -1}}]})),
    Mutation("g2", "shrink", "P3", "V shrunk: excluded tubes grown from epsilon/2 to 2 epsilon",
             _scale("V", 0, "2")),

    Mutation("cy3", "drop_chart", "P3", "chart V removed", _drop("V")),
    Mutation("cy3", "bad_psi", "P5", "Psi(beta) on chart V set to the identity", _psi("V", "beta", 1, 1)),
    Mutation("cy3", "bad_shift", "P2", "shift of alpha on x3 changed from 0 to 1/4", _shift("alpha", 3, "1/4")),
    Mutation("cy3", "clash", "P6", "action of U_alpha replaced by a rotation of (x5,x6), against A6 on V",
             _replace_action("U_alpha", 0, {"type": "rotation", "name": "R56", "pair": [5, 6],
                                            "centers": [["0", "0"]]})),
    Mutation("cy3", "shrink", "P3", "V shrunk: excluded tubes grown from epsilon/2 to 2 epsilon",
             _scale("V", 0, "2")),
]


def bundled_doc(name: str) -> dict:
    return json.loads((SPEC_DIR / f"{name}.spec").read_text(encoding="utf-8"))


def mutated_text(m: Mutation) -> str:
    doc = copy.deepcopy(bundled_doc(m.spec))
    m.apply(doc)
    doc["name"] = m.name
    doc["mutation"] = {"of": m.spec, "expect_fail": m.expect_fail, "description": m.description}
    return serialize_spec(parse_spec(doc))


def write_fixtures(out: Path = FIXTURE_DIR) -> list[Path]:
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for m in MUTATIONS:
        p = out / f"{m.name}.spec"
        p.write_text(mutated_text(m), encoding="utf-8")
        paths.append(p)
    return paths


if __name__ == "__main__":
    for p in write_fixtures():
        print(p)
