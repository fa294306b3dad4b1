from fractions import Fraction

import pytest

from g2daha.daha import (
    T1,
    ParameterSpec,
    evaluate_relations,
    index_normalize,
    relation_set,
    uniform_point,
)
from g2daha.mcg import twist_map
from g2daha.poly import Polynomial, substitute


@pytest.mark.parametrize("kind, offsets, name", [
    ("pair", (6, 7), "O61"),
    ("triple", (4, 5, 6), "O123"),
    ("single", (8,), "O2"),
    ("triple", (6,), "O345"),
    ("pair", (0,), "O61"),
])
def test_index_normalize(kind, offsets, name):
    assert index_normalize(kind, *offsets).name == name


def test_index_normalize_rejects_gaps():
    with pytest.raises(ValueError):
        index_normalize("pair", 1, 3)


def test_relation_count_and_labels():
    rels = relation_set(T1)
    assert len(rels) == 19
    assert rels.labels[0] == "F1[1]" and rels.labels[-1] == "Casimir"


def test_casimir_constant_at_t1():
    casimir = relation_set(T1).relations[-1]
    assert casimir.as_dict().get((0,) * 16) == 8


def test_uniform_points():
    assert all(v.is_zero() for v in evaluate_relations(uniform_point(2, 2, 2)))
    assert all(v.is_zero() for v in evaluate_relations(uniform_point(-1, -1, 2)))
    assert any(not v.is_zero() for v in evaluate_relations(uniform_point(3, 3, 3)))


@pytest.mark.parametrize("u0", [Fraction(1), Fraction(3, 2), Fraction(2, 3)])
def test_rotation_covariance(u0):
    rels = relation_set(ParameterSpec(u0))
    rot = twist_map("I")
    for fam in range(3):
        block = rels.relations[6 * fam:6 * fam + 6]
        for i in range(6):
            assert substitute(block[i], rot) == block[(i + 1) % 6], rels.labels[6 * fam + i]
    assert substitute(rels.relations[-1], rot) == rels.relations[-1]


@pytest.mark.parametrize("u0", [Fraction(1), Fraction(3, 2), Fraction(-5, 4)])
def test_symbolic_relations_specialize(u0):
    sym, spec = relation_set(ParameterSpec()), relation_set(ParameterSpec(u0))
    assert sym.mode == "symbolic" and spec.mode == "specialized"
    for r, k, expected in zip(sym.relations, sym.multipliers, spec.relations):
        assert r.specialize_u(u0) * (u0 ** -k) == expected


def test_parameter_spec():
    p = ParameterSpec(Fraction(3, 2))
    assert p.t == Fraction(3, 2) ** 12
    assert p.s == Fraction(729, 64) + Fraction(64, 729)
    with pytest.raises(ValueError):
        ParameterSpec(0)
    with pytest.raises(ValueError):
        ParameterSpec().t


def test_evaluate_requires_all_coordinates():
    pt = uniform_point(2, 2, 2)
    del pt["O1"]
    with pytest.raises(KeyError):
        evaluate_relations(pt)


def test_relations_are_polynomials_over_q():
    for r in relation_set(ParameterSpec(Fraction(3, 2))):
        assert isinstance(r, Polynomial) and r.domain() == "Q"
