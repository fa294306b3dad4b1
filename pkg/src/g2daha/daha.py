"""Classical (q = 1) genus-two DAHA: generators, index rules and the 19 relations."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .poly import PAIRS, SINGLES, TRIPLES, U, NV, Polynomial, var
from .scalars import QuadTowerScalar


@dataclass(frozen=True)
class GeneratorIndex:
    kind: str  # single | pair | triple
    base: int

    @property
    def name(self) -> str:
        if self.kind == "single":
            return SINGLES[self.base - 1]
        if self.kind == "pair":
            return PAIRS[self.base - 1]
        return TRIPLES[self.base - 1]


def index_normalize(kind: str, *offsets: int) -> GeneratorIndex:
    """Canonical generator for raw (possibly out-of-range) cyclic indices.

    Singles and pairs live in Z/6; consecutive triples are identified with
    their complement (O456 = O123 and so on), so triples live in Z/3.
    """
    if not offsets:
        raise ValueError("at least one index is required")
    first = offsets[0]
    sizes = {"single": 1, "pair": 2, "triple": 3}
    if kind not in sizes:
        raise ValueError(f"unknown generator kind {kind!r}")
    if len(offsets) not in (1, sizes[kind]):
        raise ValueError(f"{kind} takes 1 or {sizes[kind]} indices")
    for a, b in zip(offsets, offsets[1:]):
        if (b - a) % 6 != 1:
            raise ValueError(f"indices {offsets} are not cyclically consecutive")
    base = (first - 1) % 6 + 1
    if kind == "triple":
        base = (base - 1) % 3 + 1
    return GeneratorIndex(kind, base)


def O(i: int) -> Polynomial:
    return var(index_normalize("single", i).name)


def P(i: int) -> Polynomial:
    """O_{i,i+1}"""
    return var(index_normalize("pair", i).name)


def T(i: int) -> Polynomial:
    """O_{i,i+1,i+2}"""
    return var(index_normalize("triple", i).name)


@dataclass(frozen=True)
class ParameterSpec:
    """Fiber choice: u0 = None keeps u symbolic, otherwise u = u0 and t = u0^12."""

    u0: Fraction | None = None

    def __post_init__(self):
        if self.u0 is not None:
            object.__setattr__(self, "u0", Fraction(self.u0))
            if self.u0 == 0:
                raise ValueError("u0 must be nonzero")

    @property
    def symbolic(self) -> bool:
        return self.u0 is None

    @property
    def t(self) -> Fraction:
        if self.u0 is None:
            raise ValueError("t is symbolic")
        return self.u0 ** 12

    @property
    def s(self) -> Fraction:
        """t^(1/2) + t^(-1/2)"""
        if self.u0 is None:
            raise ValueError("t is symbolic")
        return self.u0 ** 6 + self.u0 ** -6

    def __str__(self):
        return "u symbolic" if self.u0 is None else f"u0={self.u0}"


T1 = ParameterSpec(Fraction(1))


def _family1(i):
    a = O(i + 2) * O(i + 4) + O(i + 3) * T(i + 2) - P(i + 2) * P(i + 3)
    return a, -O(i), None


def _family2(i):
    a = P(i + 3) * T(i + 1) - O(i + 3) * P(i + 5) - O(i + 4) * P(i + 1)
    return a, -(P(i) - O(i) * O(i + 1)), None


def _family3(i):
    a = T(i) * T(i + 1) - P(i + 1) * P(i + 4) - O(i) * O(i + 3)
    b = T(i + 2) - O(i + 1) * P(i + 5) - O(i + 5) * P(i) + O(i) * O(i + 1) * O(i + 5)
    return a, b, None


def _casimir():
    a = T(1) * T(2) * T(3) - (O(1) * O(4) * T(3) + O(2) * O(5) * T(1) + O(3) * O(6) * T(2))
    a -= O(1) * O(3) * O(5) + O(2) * O(4) * O(6)
    half = Fraction(1, 2)
    b = sum((O(k) * O(k - 1) * P(k - 1) for k in range(1, 7)), Polynomial())
    b -= sum((P(k) ** 2 for k in range(1, 7)), Polynomial())
    return a, b * half, Polynomial.const(1)


def _parts():
    labels, parts = [], []
    for name, fam in (("F1", _family1), ("F2", _family2), ("F3", _family3)):
        for i in range(1, 7):
            labels.append(f"{name}[{i}]")
            parts.append(fam(i))
    labels.append("Casimir")
    parts.append(_casimir())
    return labels, parts


def _u(k: int) -> Polynomial:
    e = [0] * NV
    e[U] = k
    return Polynomial._from_dict({tuple(e): Fraction(1)})


@dataclass(frozen=True)
class RelationSet:
    relations: tuple
    labels: tuple
    param: ParameterSpec
    multipliers: tuple  # relation = multiplier-cleared form; u^k factor per entry

    @property
    def mode(self) -> str:
        return "symbolic" if self.param.symbolic else "specialized"

    def __len__(self):
        return len(self.relations)

    def __iter__(self):
        return iter(self.relations)


def relation_set(p: ParameterSpec = T1) -> RelationSet:
    """The 18 indexed relations and the Casimir relation at q = 1.

    Each relation has the shape A + s*B (+ s^3 for the Casimir) with
    s = t^(1/2) + t^(-1/2).  In symbolic mode s is cleared by u^6 (u^18
    for the Casimir) and the multiplier exponents are recorded.
    """
    labels, parts = _parts()
    rels, mults = [], []
    for a, b, c in parts:
        if p.symbolic:
            k = 18 if c is not None else 6
            s_cleared = _u(12) + 1  # u^6 * s
            r = _u(k) * a + _u(k - 6) * s_cleared * b
            if c is not None:
                r += s_cleared ** 3 * c
            rels.append(r)
            mults.append(k)
        else:
            s = p.s
            r = a + b * s
            if c is not None:
                r += c * s ** 3
            rels.append(r)
            mults.append(0)
    return RelationSet(tuple(rels), tuple(labels), p, tuple(mults))


def evaluate_relations(point: Mapping[str, object], p: ParameterSpec = T1, rels: RelationSet | None = None) -> list:
    """Exact values of the 19 relations at a point over Q(i, sqrt2, sqrt3, sqrt5)."""
    if p.symbolic:
        raise ValueError("evaluation needs a specialized u0")
    missing = [n for n in SINGLES + PAIRS + TRIPLES if n not in point]
    if missing:
        raise KeyError(f"point does not assign {missing}")
    rels = rels or relation_set(p)
    vals = {n: v if isinstance(v, QuadTowerScalar) else QuadTowerScalar.rational(v) for n, v in point.items()}
    return [r.evaluate(vals) for r in rels.relations]


def uniform_point(single, pair, triple) -> dict:
    """Point with every O_i, O_{i,i+1}, O_{i,i+1,i+2} equal to the given values."""
    out = {n: single for n in SINGLES}
    out.update({n: pair for n in PAIRS})
    out.update({n: triple for n in TRIPLES})
    return out
