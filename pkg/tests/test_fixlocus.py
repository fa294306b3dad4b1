import csv
import io
import json
from fractions import Fraction

import numpy as np
import pytest

from g2daha.daha import T1, ParameterSpec
from g2daha.fixlocus import (
    FAIL,
    NOT_VERIFIED,
    PASS,
    SKIPPED,
    ClaimedComponent,
    Registry,
    RegistryError,
    SubgroupRecord,
    VerifyOptions,
    constraint_generators,
    constraint_ideal,
    emit_report,
    equivalence_pairs,
    equivalence_report,
    fiber_parameter,
    load_registry,
    verify_component,
    verify_subgroup,
)
from g2daha.groebner import GBLimits, ideal_contains
from g2daha.mcg import TwistWord, relation_residuals, sample_common_zero
from g2daha.parser import parse_expr
from g2daha.poly import O_VARS, var


@pytest.fixture(scope="module")
def reg():
    return load_registry()


def component(reg, subgroup, name):
    return next(c for c in reg.components if c.subgroup == subgroup and c.name == name)


def write_registry(tmp_path, doc):
    path = tmp_path / "reg.json"
    path.write_text(json.dumps(doc))
    return path


def minimal_doc():
    return {
        "subgroups": [{"label": "G_z", "iso": "Z_1", "order": 1, "ramification": "{2;}"}],
        "components": [{"subgroup": "G_z", "fiber": "t1", "name": "I_1", "kind": "ideal", "dim": 14,
                        "generators": ["O1 - 2"], "provenance": "test"}],
    }


def test_census(reg):
    counts = reg.counts()
    assert counts["subgroups"] == 14
    assert counts["components"] == len(reg.components)
    assert len(reg.components_of("G_i", "t1")) == 5
    assert {c.kind for c in reg.components} == {"ideal", "point", "ambiguous"}


def test_provenance_is_unique(reg):
    tags = [c.provenance for c in reg.components]
    assert all(tags)
    assert len(set(tags)) == len(tags)
    displaced = [c for c in reg.components if c.displaced]
    assert {c.subgroup for c in displaced} == {"G_m"}
    assert len(displaced) == 2


def test_equivalence_partners_recorded(reg):
    pairs = dict(equivalence_pairs(reg))
    assert pairs == {"G_b": "G_f", "G_h": "G_o", "G_i": "G_p", "G_k2": "G_s", "G_r": "G_w"}


def test_point_components_are_complete(reg):
    for c in reg.components:
        if c.kind == "point":
            assert {n for n, _ in c.point} == set(O_VARS)
        if c.kind == "ideal":
            assert c.dim is not None


def test_malformed_expression(tmp_path):
    doc = minimal_doc()
    doc["components"][0]["generators"] = ["O7 - 1"]
    with pytest.raises(RegistryError, match="O7"):
        load_registry(write_registry(tmp_path, doc))


def test_schema_violation(tmp_path):
    doc = minimal_doc()
    doc["components"][0]["fiber"] = "t2"
    with pytest.raises(RegistryError, match="components/0/fiber"):
        load_registry(write_registry(tmp_path, doc))
    doc = minimal_doc()
    doc["components"][0]["subgroup"] = "G_q"
    with pytest.raises(RegistryError, match="unknown subgroup"):
        load_registry(write_registry(tmp_path, doc))


def test_custom_registry_round_trip(tmp_path):
    reg = load_registry(write_registry(tmp_path, minimal_doc()))
    rep = verify_component(reg.components[0], reg, T1)
    assert rep.computed_dim == 14
    assert rep.checks["VANISHING"].verdict == FAIL


def test_constraint_ideal_examples():
    assert constraint_generators([TwistWord(("z0",))]) == []
    assert len(constraint_ideal([TwistWord(("z0",))], T1)) == 19
    rot = constraint_generators([TwistWord(("I",))])
    for a, b in [("O2", "O1"), ("O3", "O2"), ("O12", "O61"), ("O234", "O123")]:
        assert var(a) - var(b) in rot
    cube = constraint_generators([TwistWord(("I", "I", "I"))])
    for a, b in [("O4", "O1"), ("O5", "O2"), ("O6", "O3"), ("O45", "O12")]:
        assert var(a) - var(b) in cube


def test_golden_point_vanishes(reg):
    rep = verify_component(component(reg, "G_h", "I_2"), reg, T1)
    assert rep.checks["VANISHING"].verdict == PASS
    assert rep.overall == PASS


def test_ideal_component_dimension(reg):
    rep = verify_component(component(reg, "G_c", "I_1"), reg, T1)
    assert rep.computed_dim == 2
    assert rep.checks["VANISHING"].verdict == PASS
    assert rep.checks["CONTAINMENT"].verdict == PASS


def test_negative_control_point(reg):
    fake = ClaimedComponent("G_h", "t1", "all-3", "point", 0, "control",
                            point=tuple((n, "3") for n in O_VARS),
                            parsed_point=tuple((n, parse_expr("3")) for n in O_VARS))
    rep = verify_component(fake, reg, T1)
    assert rep.checks["VANISHING"].verdict == FAIL
    assert rep.overall == FAIL


def test_whole_variety(reg):
    rep = verify_subgroup("G_a", "t1", reg, opts=VerifyOptions(relation_dimension=False))
    (c,) = rep.components
    assert c.info["jacobian_ranks"] == [9, 9, 9]
    assert c.overall == PASS


def test_subgroup_g_e(reg):
    rep = verify_subgroup("G_e", "t1", reg)
    assert [c.name for c in rep.components] == ["I_1", "I_2"]
    assert [c.claimed_dim for c in rep.components] == [2, 2]


def test_subgroup_g_n(reg):
    rep = verify_subgroup("G_n", "t1", reg)
    by_name = {c.name: c for c in rep.components}
    assert by_name["I_1"].checks["DIMENSION"].verdict == PASS
    assert by_name["I_2"].overall == PASS
    assert by_name["I_3"].overall == SKIPPED


def test_budget_abort_is_not_a_failure(reg):
    opts = VerifyOptions(gb_limits=GBLimits(max_pairs=1))
    rep = verify_component(component(reg, "G_k1", "I_1"), reg, T1, opts)
    assert rep.overall == NOT_VERIFIED
    assert rep.budget["aborted"] == "pairs"


def test_equivalence_report(reg):
    (entry,) = equivalence_report([("G_b", "G_f")], reg, T1)
    assert entry.status == "METADATA-ONLY" and "G_b" in entry.detail
    (entry,) = equivalence_report([("G_k2", "G_s")], reg, T1)
    assert entry.status == "METADATA-ONLY"
    rot = (TwistWord(("I", "I")),)
    twin = Registry({"A": SubgroupRecord("A", "Z3", 3, "", rot), "B": SubgroupRecord("B", "Z3", 3, "", rot)}, ())
    (entry,) = equivalence_report([("A", "B")], twin, T1)
    assert entry.status == "EQUAL"


def test_containment_chain(reg):
    for c in reg.components:
        words = reg.subgroup(c.subgroup).action_words
        if c.kind != "ideal" or c.whole_variety or not words:
            continue
        p = fiber_parameter(c.fiber)
        if verify_component(c, reg, p).overall == PASS:
            assert ideal_contains(c.generators_at(p.u0), constraint_ideal(words, p))


def test_vanishing_soundness(reg):
    checked = 0
    for c in reg.components:
        if c.kind != "ideal" or c.whole_variety:
            continue
        p = fiber_parameter(c.fiber)
        rep = verify_component(c, reg, p, VerifyOptions(relation_dimension=False))
        if rep.checks["VANISHING"].verdict != PASS or rep.computed_dim == "empty":
            continue
        for seed in range(3):
            pt = sample_common_zero(c.generators_at(p.u0), seed=seed)
            assert np.max(np.abs(relation_residuals(pt.as_array(), p))) <= 1e-8
        checked += 1
    assert checked >= 4


def test_specialization_consistency(reg):
    third = ParameterSpec(Fraction(2, 3))
    for c in reg.components:
        if c.fiber != "tdef" or c.kind == "ambiguous" or c.whole_variety:
            continue
        at = [verify_component(c, reg, ParameterSpec(u)).overall for u in (Fraction(1), Fraction(3, 2))]
        if at == [PASS, PASS]:
            assert verify_component(c, reg, third).overall == PASS, c.key


def test_emit_empty_report():
    assert json.loads(emit_report([], "json"))["components"] == []
    rows = list(csv.reader(io.StringIO(emit_report([], "csv"))))
    assert len(rows) == 1 and rows[0][0] == "subgroup"
    assert emit_report([], "md").startswith("# Fixed-locus verification report")
    with pytest.raises(ValueError):
        emit_report([], "xml")


def test_emit_csv_quotes_expressions(reg):
    c = component(reg, "G_c", "I_1")
    rep = verify_component(c, reg, T1)
    text = emit_report([rep], "csv")
    (row,) = list(csv.DictReader(io.StringIO(text)))
    assert row["expressions"] == "; ".join(c.generators)
    assert '"' in text


def test_report_rows_cover_registry(reg):
    opts = VerifyOptions(relation_dimension=False)
    reports = [verify_component(c, reg, fiber_parameter(c.fiber), opts) for c in reg.components
               if not c.whole_variety]
    rows = list(csv.DictReader(io.StringIO(emit_report(reports, "csv"))))
    assert len(rows) == len(reports)
    keys = [(r["subgroup"], r["fiber"], r["component"]) for r in rows]
    assert keys == sorted(keys)
    assert emit_report(reports, "json") == emit_report(list(reversed(reports)), "json")
