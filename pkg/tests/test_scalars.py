import cmath
from fractions import Fraction

import pytest
from hypothesis import given

from g2daha.scalars import QuadTowerScalar as Q, is_zero, to_complex

from conftest import tower_scalars

i = Q.sqrt(-1)
r2, r3, r5 = Q.sqrt(2), Q.sqrt(3), Q.sqrt(5)
phi = (r5 - 1) / 2


def test_radical_squares():
    assert r2 * r2 == 2
    assert i * i == -1
    assert Q.sqrt(8) == 2 * r2
    assert Q.sqrt(-6) == i * r2 * r3


def test_sixth_root_of_unity_cubes_to_minus_one():
    w = (1 + i * r3) / 2
    assert w ** 3 == -1
    assert w ** 6 == 1


def test_golden_ratio_minimal_polynomial():
    assert (phi ** 2 + phi - 1).is_zero()


@pytest.mark.parametrize("value", [Q(), r2 - r2, 2 - r2 * r2, Fraction(0), 0])
def test_zero_detection(value):
    assert is_zero(value)


def test_nonzero_detection():
    assert not (r2 - 1).is_zero()
    assert not (r2 + r3 - r5).is_zero()


def test_embedding_examples():
    assert to_complex(i) == pytest.approx(1j)
    assert to_complex(phi) == pytest.approx(0.6180339887498949)
    assert to_complex((1 + i) * r2) == pytest.approx(complex(2 ** 0.5, 2 ** 0.5))


def test_sqrt_of_unsupported_prime_is_rejected():
    with pytest.raises(ValueError):
        Q.sqrt(7)


def test_string_form_is_readable():
    assert str(phi) == "-1/2 + 1/2*sqrt(5)"
    assert str(Q()) == "0"


@given(tower_scalars(), tower_scalars(), tower_scalars())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == 0


@given(tower_scalars(bound=10 ** 6), tower_scalars(bound=10 ** 6))
def test_embedding_is_multiplicative(a, b):
    lhs, rhs = to_complex(a * b), to_complex(a) * to_complex(b)
    assert cmath.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-12 * (1 + abs(to_complex(a)) * abs(to_complex(b))))


@given(tower_scalars())
def test_nonzero_embedding_means_nonzero(a):
    if abs(to_complex(a)) > 1e-9:
        assert not a.is_zero()
    if not a.is_zero():
        assert a * a.inverse() == 1
