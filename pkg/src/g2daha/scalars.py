"""Exact scalars: rationals and the multiquadratic field Q(i, sqrt2, sqrt3, sqrt5).

Rationals are plain :class:`fractions.Fraction` values.  Elements of the
tower are stored sparsely as ``{mask: Fraction}`` where bit k of ``mask``
selects the k-th radical of ``RADICANDS``; mask 0 is the rational part.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Mapping, Union

RADICANDS = (-1, 2, 3, 5)
NBASIS = 1 << len(RADICANDS)


def _basis_name(mask: int) -> str:
    parts = []
    for k, d in enumerate(RADICANDS):
        if mask >> k & 1:
            parts.append("i" if d == -1 else f"sqrt({d})")
    return "*".join(parts)


def _mul_table():
    table = {}
    for a in range(NBASIS):
        for b in range(NBASIS):
            factor = 1
            common = a & b
            for k, d in enumerate(RADICANDS):
                if common >> k & 1:
                    factor *= d
            table[a, b] = (a ^ b, factor)
    return table


_MUL = _mul_table()
_EMBED = []
for _m in range(NBASIS):
    _z = complex(1.0)
    for _k, _d in enumerate(RADICANDS):
        if _m >> _k & 1:
            _z *= 1j if _d == -1 else math.sqrt(_d)
    _EMBED.append(_z)

Scalar = Union[int, Fraction, "QuadTowerScalar"]


class QuadTowerScalar:
    """Immutable element of Q(sqrt(-1), sqrt(2), sqrt(3), sqrt(5))."""

    __slots__ = ("_c", "_hash")

    def __init__(self, coords: Mapping[int, Fraction] | Iterable = ()):
        if isinstance(coords, Mapping):
            items = coords.items()
        else:
            items = enumerate(coords)
        c = {}
        for mask, v in items:
            if not 0 <= mask < NBASIS:
                raise ValueError(f"basis index {mask} out of range")
            v = Fraction(v)
            if v:
                c[mask] = v
        self._c = c
        self._hash = None

    @classmethod
    def _raw(cls, c: dict) -> "QuadTowerScalar":
        obj = cls.__new__(cls)
        obj._c = c
        obj._hash = None
        return obj

    @classmethod
    def rational(cls, q) -> "QuadTowerScalar":
        q = Fraction(q)
        return cls._raw({0: q} if q else {})

    @classmethod
    def sqrt(cls, n: int) -> "QuadTowerScalar":
        """sqrt(n) for an integer whose square-free part lies in the tower."""
        n = int(n)
        if n == 0:
            return cls._raw({})
        mask = 0
        m = n
        if m < 0:
            mask |= 1
            m = -m
        outside = 1
        for k, p in enumerate((2, 3, 5), start=1):
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            if e % 2:
                mask |= 1 << k
            outside *= p ** (e // 2)
        r = math.isqrt(m)
        if r * r != m:
            raise ValueError(f"sqrt({n}) is not in Q(i, sqrt2, sqrt3, sqrt5)")
        return cls._raw({mask: Fraction(outside * r)})

    @property
    def coords(self) -> tuple:
        """All 16 coordinates, indexed by mask."""
        return tuple(self._c.get(m, Fraction(0)) for m in range(NBASIS))

    def items(self):
        return sorted(self._c.items())

    def is_zero(self) -> bool:
        return not self._c

    def is_rational(self) -> bool:
        return all(m == 0 for m in self._c)

    def rational_part(self) -> Fraction:
        return self._c.get(0, Fraction(0))

    def __bool__(self):
        return bool(self._c)

    @staticmethod
    def _coerce(x) -> "QuadTowerScalar":
        if isinstance(x, QuadTowerScalar):
            return x
        if isinstance(x, (int, _RationalABC)):
            return QuadTowerScalar.rational(x)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        c = dict(self._c)
        for m, v in other._c.items():
            s = c.get(m, 0) + v
            if s:
                c[m] = s
            else:
                c.pop(m, None)
        return QuadTowerScalar._raw(c)

    __radd__ = __add__

    def __neg__(self):
        return QuadTowerScalar._raw({m: -v for m, v in self._c.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, _RationalABC)) and not isinstance(other, QuadTowerScalar):
            q = Fraction(other)
            if not q:
                return QuadTowerScalar._raw({})
            return QuadTowerScalar._raw({m: v * q for m, v in self._c.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        c: dict = {}
        for a, va in self._c.items():
            for b, vb in other._c.items():
                m, f = _MUL[a, b]
                c[m] = c.get(m, 0) + va * vb * f
        return QuadTowerScalar._raw({m: v for m, v in c.items() if v})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = QuadTowerScalar.rational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def conjugate_at(self, k: int) -> "QuadTowerScalar":
        """Galois conjugate flipping the sign of the k-th radical."""
        bit = 1 << k
        return QuadTowerScalar._raw({m: (-v if m & bit else v) for m, v in self._c.items()})

    def inverse(self) -> "QuadTowerScalar":
        """Inverse by taking norms down the tower one radical at a time."""
        if not self._c:
            raise ZeroDivisionError("inverse of zero")
        x = self
        num = QuadTowerScalar.rational(1)
        for k in range(len(RADICANDS)):
            conj = x.conjugate_at(k)
            num = num * conj
            x = x * conj
        assert x.is_rational()
        return num * (1 / x.rational_part())

    def __truediv__(self, other):
        if isinstance(other, (int, _RationalABC)) and not isinstance(other, QuadTowerScalar):
            return self * (1 / Fraction(other))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._c == other._c

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(self.rational_part())
            else:
                self._hash = hash(frozenset(self._c.items()))
        return self._hash

    def to_complex(self) -> complex:
        z = complex(0.0)
        for m, v in self._c.items():
            z += float(v) * _EMBED[m]
        return z

    def __complex__(self):
        return self.to_complex()

    def __repr__(self):
        return f"QuadTowerScalar({self})"

    def __str__(self):
        if not self._c:
            return "0"
        out = []
        for m, v in sorted(self._c.items()):
            name = _basis_name(m)
            if not name:
                out.append(str(v))
            elif v == 1:
                out.append(name)
            elif v == -1:
                out.append("-" + name)
            else:
                out.append(f"{v}*{name}")
        s = " + ".join(out).replace("+ -", "- ")
        return s


I = QuadTowerScalar._raw({1: Fraction(1)})


def is_zero(a: Scalar) -> bool:
    if isinstance(a, QuadTowerScalar):
        return a.is_zero()
    return a == 0


def to_complex(a: Scalar) -> complex:
    """Numeric embedding: sqrt(-1) to i, other radicals to positive reals."""
    z = a.to_complex() if isinstance(a, QuadTowerScalar) else complex(float(a))
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise OverflowError("embedding is not finite")
    return z


def demote(a: Scalar) -> Scalar:
    """Return a Fraction when a tower element happens to be rational."""
    if isinstance(a, QuadTowerScalar) and a.is_rational():
        return a.rational_part()
    if isinstance(a, int):
        return Fraction(a)
    return a

