import copy
import json

import pytest

from kummerf.mutations import FIXTURE_DIR, MUTATIONS, PRIMARY, SPEC_DIR, bundled_doc, mutated_text
from kummerf.structure import SpecError, build_model, load_spec, parse_spec, serialize_spec, spec_to_dict
from kummerf.torus import Slab


@pytest.mark.parametrize("name", PRIMARY)
def test_bundled_specs_are_byte_stable(name):
    text = (SPEC_DIR / f"{name}.spec").read_text(encoding="utf-8")
    spec = parse_spec(text)
    assert serialize_spec(spec) == text
    assert serialize_spec(parse_spec(spec_to_dict(spec))) == text


def test_fixtures_match_the_mutation_table():
    files = sorted(p.name for p in FIXTURE_DIR.glob("*.spec"))
    assert files == sorted(f"{m.name}.spec" for m in MUTATIONS)
    for m in MUTATIONS:
        assert (FIXTURE_DIR / f"{m.name}.spec").read_text(encoding="utf-8") == mutated_text(m)


def test_each_primary_spec_has_four_mutation_kinds():
    for name in PRIMARY:
        passes = {m.expect_fail for m in MUTATIONS if m.spec == name}
        assert {"P2", "P3", "P5", "P6"} <= passes
        assert sum(m.spec == name for m in MUTATIONS) >= 4


def _bad(mutate):
    doc = copy.deepcopy(bundled_doc("j8"))
    mutate(doc)
    with pytest.raises(SpecError) as info:
        parse_spec(doc)
    return info.value


def test_unknown_keys_are_rejected_with_location():
    err = _bad(lambda d: d["charts"][1].update(colour="red"))
    assert "colour" in str(err) and err.where.startswith("charts[1]")
    err = _bad(lambda d: d.update(extra=1))
    assert "extra" in str(err)


def test_bad_values_and_references():
    err = _bad(lambda d: d["generators"][0]["shift"].__setitem__(0, 0.5))
    assert err.where.startswith("generators[0]")
    err = _bad(lambda d: d["generators"][0]["shift"].__setitem__(0, "1/x"))
    assert err.where.startswith("generators[0]")
    err = _bad(lambda d: d["generators"][0]["signs"].__setitem__(0, 2))
    assert err.where.startswith("generators[0]")
    err = _bad(lambda d: d["resolution_charts"][0].update(element="alpha*omega"))
    assert "omega" in str(err)
    err = _bad(lambda d: d.update(torus_dim=0))
    assert err.where == "spec.torus_dim"
    err = _bad(lambda d: d.update(format="kummerf-spec/0"))
    assert err.where == "spec.format"


def test_invalid_json_reports_line_and_column():
    with pytest.raises(SpecError) as info:
        parse_spec('{\n  "format": "kummerf-spec/1",\n  "name" "k3"\n}')
    assert info.value.where.startswith("line 3")


def test_quotient_chart_requires_psi():
    doc = copy.deepcopy(bundled_doc("k3"))
    del doc["charts"][0]["psi"]
    with pytest.raises(SpecError):
        parse_spec(doc)


def test_load_spec(tmp_path):
    p = tmp_path / "k3.spec"
    p.write_text(json.dumps(bundled_doc("k3")), encoding="utf-8")
    assert load_spec(p).name == "k3"


def test_k3_model(model_of):
    m = model_of("k3")
    assert m.group.order == 2
    assert len(m.singular) == 16 and all(s.free_dim == 0 for s in m.singular)
    assert [c.id for c in m.charts] == ["U", "V1", "V2", "V3", "V4", "X"]
    U = m.chart("U")
    assert U.covering == "quotient" and U.psi[1] == [-1]
    V1 = m.chart("V1")
    assert V1.covering == "trivial" and set(V1.region.excluded) == set(m.singular)
    X = m.chart("X")
    assert X.kind == "resolution" and len(X.components()) == 16


def test_derived_constraints_in_g2(model_of):
    m = model_of("g2")
    V = m.chart("V")
    assert all(V.derived) and len(V.region.constraints) == 3
    for con, res in zip(V.region.constraints, ("U_alpha", "U_beta", "U_gamma")):
        tube_con = m.chart(res).region.constraints[0]
        assert not con.inside and con.centers == tube_con.centers
        assert con.radius == tube_con.radius / 2


def test_epsilon_scales_radii():
    spec = parse_spec(bundled_doc("k3"))
    a = build_model(spec, "1/16").chart("V1").region.constraints[0].radius
    b = build_model(spec, "1/32").chart("V1").region.constraints[0].radius
    assert a == 2 * b


def test_singular_set_of_j8(model_of):
    m = model_of("j8")
    dims = sorted({s.free_dim for s in m.singular})
    assert dims == [0, 4]
    assert sum(s.free_dim == 4 for s in m.singular) == 64
    assert Slab(8, {i: 0 for i in range(8)}) in m.singular
