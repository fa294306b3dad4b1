"""Polynomials in the 15 trace generators plus the deformation root u (u^12 = t)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .scalars import QuadTowerScalar, demote

SINGLES = ("O1", "O2", "O3", "O4", "O5", "O6")
PAIRS = ("O12", "O23", "O34", "O45", "O56", "O61")
TRIPLES = ("O123", "O234", "O345")
O_VARS = SINGLES + PAIRS + TRIPLES
VARIABLES = O_VARS + ("u",)
NV = len(VARIABLES)
NO = len(O_VARS)
U = NV - 1
INDEX = {name: k for k, name in enumerate(VARIABLES)}

ZERO_EXP = (0,) * NV


class LimitExceeded(RuntimeError):
    """A configured size guard (degree, terms, pairs, time) was hit."""

    def __init__(self, which: str, detail: str = ""):
        self.which = which
        super().__init__(f"{which} limit exceeded" + (f": {detail}" if detail else ""))


@dataclass(frozen=True)
class TermOrder:
    """A monomial order; ``priority`` lists variable indices, highest first.

    For ``block`` orders the first ``split`` entries of ``priority`` form the
    eliminated block and each block is ordered by degrevlex.
    """

    kind: str = "degrevlex"
    priority: tuple = tuple(range(NV))
    split: int = 0

    def __post_init__(self):
        if self.kind not in ("lex", "degrevlex", "block"):
            raise ValueError(f"unknown order kind {self.kind!r}")
        if sorted(self.priority) != list(range(len(self.priority))):
            raise ValueError("priority must be a permutation of variable indices")
        if self.kind == "block" and not 0 < self.split < len(self.priority):
            raise ValueError("block order needs 0 < split < nvars")

    @property
    def nvars(self) -> int:
        return len(self.priority)

    def key_function(self) -> Callable[[tuple], tuple]:
        """Return f with m1 > m2 in this order iff f(m1) > f(m2)."""
        p = self.priority
        if self.kind == "lex":
            if p == tuple(range(len(p))):
                return lambda e: e
            return lambda e: tuple([e[i] for i in p])
        rev = tuple(reversed(p))
        if self.kind == "degrevlex":
            return lambda e: (sum(e), tuple([-e[i] for i in rev]))
        first, second = p[: self.split], p[self.split :]
        rf, rs = tuple(reversed(first)), tuple(reversed(second))

        def key(e):
            return (
                sum([e[i] for i in first]),
                tuple([-e[i] for i in rf]),
                sum([e[i] for i in second]),
                tuple([-e[i] for i in rs]),
            )

        return key

    def key(self, exps: tuple) -> tuple:
        return self.key_function()(exps)

    @classmethod
    def lex(cls, names: Sequence[str] | None = None, nvars: int = NV) -> "TermOrder":
        return cls("lex", _priority(names, nvars))

    @classmethod
    def degrevlex(cls, names: Sequence[str] | None = None, nvars: int = NV) -> "TermOrder":
        return cls("degrevlex", _priority(names, nvars))

    @classmethod
    def block(cls, first: Iterable[str], nvars: int = NV) -> "TermOrder":
        """Elimination order: variables in ``first`` dominate all others."""
        first_idx = [INDEX[n] for n in first]
        rest = [k for k in range(nvars) if k not in first_idx]
        return cls("block", tuple(first_idx + rest), len(first_idx))


def _priority(names, nvars):
    if names is None:
        return tuple(range(nvars))
    head = [INDEX[n] for n in names]
    return tuple(head + [k for k in range(nvars) if k not in head])


DEGREVLEX = TermOrder()
_KEYS: dict = {}


def _keyfn(order: TermOrder):
    fn = _KEYS.get(order)
    if fn is None:
        fn = _KEYS[order] = order.key_function()
    return fn


def compare_monomials(m1: tuple, m2: tuple, order: TermOrder = DEGREVLEX) -> int:
    """-1, 0 or 1 according as m1 <, =, > m2."""
    k = _keyfn(order)
    a, b = k(tuple(m1)), k(tuple(m2))
    return (a > b) - (a < b)


# raw dict helpers: {exponent tuple: coefficient}


def _add_into(acc: dict, d: Mapping, scale=1) -> None:
    for m, c in d.items():
        v = acc.get(m)
        v = c * scale if v is None else v + c * scale
        if v:
            acc[m] = v
        else:
            acc.pop(m, None)


def _mul(a: Mapping, b: Mapping) -> dict:
    out: dict = {}
    if len(a) > len(b):
        a, b = b, a
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = tuple([x + y for x, y in zip(ma, mb)])
            v = out.get(m)
            v = ca * cb if v is None else v + ca * cb
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def _norm(c):
    c = demote(c)
    if isinstance(c, float):
        raise TypeError("floating point coefficients are not allowed")
    return c


class Polynomial:
    """Immutable polynomial; terms are kept sorted descending in ``order``."""

    __slots__ = ("terms", "order", "_hash")

    def __init__(self, terms: Mapping | Iterable = (), order: TermOrder = DEGREVLEX):
        if isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = terms
        d: dict = {}
        for m, c in items:
            m = tuple(m)
            if len(m) != NV:
                raise ValueError(f"monomial {m} does not have {NV} exponents")
            if any(e < 0 for e in m):
                raise ValueError(f"negative exponent in {m}")
            v = d.get(m, 0) + c
            d[m] = v
        self._set(d, order)

    def _set(self, d: dict, order: TermOrder):
        key = _keyfn(order)
        self.terms = tuple(
            sorted(((m, _norm(c)) for m, c in d.items() if c), key=lambda t: key(t[0]), reverse=True)
        )
        self.order = order
        self._hash = None

    @classmethod
    def _from_dict(cls, d: dict, order: TermOrder = DEGREVLEX) -> "Polynomial":
        obj = cls.__new__(cls)
        obj._set(d, order)
        return obj

    @classmethod
    def var(cls, name: str) -> "Polynomial":
        e = [0] * NV
        e[INDEX[name]] = 1
        return cls._from_dict({tuple(e): Fraction(1)})

    @classmethod
    def const(cls, c) -> "Polynomial":
        return cls._from_dict({ZERO_EXP: c})

    def as_dict(self) -> dict:
        return dict(self.terms)

    def with_order(self, order: TermOrder) -> "Polynomial":
        return Polynomial._from_dict(self.as_dict(), order)

    # basic queries

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(m == ZERO_EXP for m, _ in self.terms)

    def constant_value(self):
        """Coefficient of 1; valid for constants."""
        for m, c in self.terms:
            if m == ZERO_EXP:
                return c
        return Fraction(0)

    def total_degree(self) -> int:
        return max((sum(m) for m, _ in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        k = INDEX[name]
        return max((m[k] for m, _ in self.terms), default=-1)

    def variables(self) -> tuple:
        used = set()
        for m, _ in self.terms:
            used.update(k for k, e in enumerate(m) if e)
        return tuple(VARIABLES[k] for k in sorted(used))

    def domain(self) -> str:
        """'Q' if every coefficient is rational, else 'QT'."""
        return "QT" if any(isinstance(c, QuadTowerScalar) for _, c in self.terms) else "Q"

    def leading_term(self, order: TermOrder | None = None):
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        if order is None or order == self.order:
            return self.terms[0]
        key = _keyfn(order)
        return max(self.terms, key=lambda t: key(t[0]))

    # arithmetic

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction, QuadTowerScalar)):
            return Polynomial.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        d = self.as_dict()
        _add_into(d, dict(other.terms))
        return Polynomial._from_dict(d, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._from_dict({m: -c for m, c in self.terms}, self.order)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        d = self.as_dict()
        _add_into(d, dict(other.terms), -1)
        return Polynomial._from_dict(d, self.order)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QuadTowerScalar)):
            return Polynomial._from_dict({m: c * other for m, c in self.terms}, self.order)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return Polynomial._from_dict(_mul(dict(self.terms), dict(other.terms)), self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Polynomial):
            if not other.is_constant() or other.is_zero():
                raise ZeroDivisionError("division only by nonzero constants")
            other = other.constant_value()
        if isinstance(other, QuadTowerScalar):
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def monic(self, order: TermOrder | None = None) -> "Polynomial":
        if not self.terms:
            return self
        return self / self.leading_term(order)[1]

    def diff(self, name: str) -> "Polynomial":
        k = INDEX[name]
        d = {}
        for m, c in self.terms:
            if m[k]:
                e = list(m)
                e[k] -= 1
                d[tuple(e)] = c * m[k]
        return Polynomial._from_dict(d, self.order)

    # comparisons

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, QuadTowerScalar)):
            other = Polynomial.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return dict(self.terms) == dict(other.terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms))
        return self._hash

    # evaluation and maps

    def evaluate(self, values: Mapping[str, object] | Sequence):
        """Evaluate with values for every variable that occurs.

        ``values`` is either a name mapping or a sequence aligned with
        ``VARIABLES`` (a 15-long sequence leaves u unassigned).
        """
        if isinstance(values, Mapping):
            vals = [values.get(n) for n in VARIABLES]
        else:
            vals = list(values) + [None] * (NV - len(values))
        powers: dict = {}
        total = 0
        for m, c in self.terms:
            term = c
            for k, e in enumerate(m):
                if e:
                    p = powers.get((k, e))
                    if p is None:
                        if vals[k] is None:
                            raise KeyError(f"no value for {VARIABLES[k]}")
                        p = powers[k, e] = vals[k] ** e
                    term = term * p
            total = total + term
        return total

    def specialize_u(self, u0) -> "Polynomial":
        u0 = Fraction(u0)
        if u0 == 0:
            raise ValueError("u0 must be nonzero (t has to be invertible)")
        d: dict = {}
        for m, c in self.terms:
            e = m[:U] + (0,)
            v = d.get(e, 0) + c * u0 ** m[U]
            d[e] = v
        return Polynomial._from_dict(d, self.order)

    def substitute(self, m: "SubstitutionMap", limits: "SizeLimits | None" = None) -> "Polynomial":
        return substitute(self, m, limits)

    def __str__(self):
        return unparse(self)

    def __repr__(self):
        return f"Polynomial({unparse(self)!r})"


def var(name: str) -> Polynomial:
    return Polynomial.var(name)


def const(c) -> Polynomial:
    return Polynomial.const(c)


# unparsing to the expression grammar


def _t_power(k: int) -> str:
    q = Fraction(k, 12)
    if q == 1:
        return "t"
    if q.denominator == 1:
        return f"t^{q.numerator}"
    return f"t^({q})"


def _monomial_text(m: tuple) -> str:
    parts = []
    for k, e in enumerate(m):
        if not e:
            continue
        if k == U:
            parts.append(_t_power(e))
        elif e == 1:
            parts.append(VARIABLES[k])
        else:
            parts.append(f"{VARIABLES[k]}^{e}")
    return "*".join(parts)


def unparse(p: Polynomial) -> str:
    if not p.terms:
        return "0"
    out = []
    for m, c in p.terms:
        mono = _monomial_text(m)
        if isinstance(c, QuadTowerScalar):
            sign, body = "+", f"({c})"
        else:
            sign = "-" if c < 0 else "+"
            body = str(abs(c))
        if mono:
            body = mono if body == "1" else f"{body}*{mono}"
        out.append((sign, body))
    text = ("-" if out[0][0] == "-" else "") + out[0][1]
    for sign, body in out[1:]:
        text += f" {sign} {body}"
    return text


# substitution maps


@dataclass(frozen=True)
class SizeLimits:
    """Guards for substitution/composition growth."""

    max_degree: int = 64
    max_terms: int = 200_000


class SubstitutionMap:
    """Ring endomorphism fixing u, given by the images of the 15 O-variables."""

    __slots__ = ("images", "name")

    def __init__(self, images: Mapping[str, Polynomial] | Sequence[Polynomial], name: str = ""):
        if isinstance(images, Mapping):
            unknown = set(images) - set(O_VARS)
            if unknown:
                raise KeyError(f"unknown variables {sorted(unknown)}")
            imgs = tuple(images.get(n, Polynomial.var(n)) for n in O_VARS)
        else:
            imgs = tuple(images)
        if len(imgs) != NO:
            raise ValueError(f"a substitution map needs {NO} images")
        self.images = imgs
        self.name = name

    @classmethod
    def identity(cls) -> "SubstitutionMap":
        return cls({}, "id")

    def __getitem__(self, name: str) -> Polynomial:
        return self.images[INDEX[name]]

    def is_identity(self) -> bool:
        return all(img == Polynomial.var(n) for n, img in zip(O_VARS, self.images))

    def then(self, other: "SubstitutionMap", limits: "SizeLimits | None" = None) -> "SubstitutionMap":
        """Images of self with other substituted into them (self first, then other)."""
        return SubstitutionMap([substitute(img, other, limits) for img in self.images])

    def max_degree(self) -> int:
        return max(img.total_degree() for img in self.images)

    def term_count(self) -> int:
        return sum(len(img.terms) for img in self.images)

    def __eq__(self, other):
        return isinstance(other, SubstitutionMap) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        inner = ", ".join(f"{n} -> {img}" for n, img in zip(O_VARS, self.images) if img != Polynomial.var(n))
        return f"SubstitutionMap({self.name or '?'}: {inner or 'identity'})"


def substitute(f: Polynomial, m: SubstitutionMap, limits: SizeLimits | None = None) -> Polynomial:
    """Image of f under the endomorphism extending m (u is fixed)."""
    images = [dict(img.terms) for img in m.images]
    cache: dict = {}

    def power(k: int, e: int) -> dict:
        p = cache.get((k, e))
        if p is None:
            if e == 1:
                p = images[k]
            else:
                half = power(k, e // 2)
                p = _mul(half, half)
                if e % 2:
                    p = _mul(p, images[k])
            cache[k, e] = p
        return p

    acc: dict = {}
    for mono, c in f.terms:
        term = {ZERO_EXP[:U] + (mono[U],): c}
        for k in range(NO):
            if mono[k]:
                term = _mul(term, power(k, mono[k]))
                if not term:
                    break
        _add_into(acc, term)
        if limits is not None and len(acc) > limits.max_terms:
            raise LimitExceeded("terms", f"{len(acc)} terms during substitution")
    out = Polynomial._from_dict(acc, f.order)
    if limits is not None and out.total_degree() > limits.max_degree:
        raise LimitExceeded("degree", f"degree {out.total_degree()} during substitution")
    return out
