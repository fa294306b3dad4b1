"""Pratt parser for the ASCII expression grammar.

Identifiers are the 15 O-generators and ``t``; ``i`` is the imaginary unit;
``sqrt`` accepts integers and ``t``.  Powers of t must be multiples of 1/12
and become integer powers of the root u.  In symbolic mode negative powers
of u are cleared by a global factor u^k, and k is returned.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .poly import INDEX, NV, O_VARS, U, ZERO_EXP, Polynomial, _add_into, _mul
from .scalars import QuadTowerScalar


class ParseError(ValueError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        where = f" at position {position}"
        if text:
            where += f": {text[:position]}<!>{text[position:]}"
        super().__init__(message + where)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()=]))")


@dataclass(frozen=True)
class Token:
    kind: str  # num, name, op, end
    value: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(Token("num", m.group(1), start))
        elif m.group(2):
            out.append(Token("name", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            out.append(Token("op", op, start))
        pos = m.end()
    out.append(Token("end", "", n))
    return out


# AST: tuples (tag, pos, ...)

_BINARY = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 30}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> Token:
        tok = self.advance()
        if tok.value != value:
            got = tok.value or "end of input"
            raise ParseError(f"expected {value!r}, got {got!r}", tok.pos, self.text)
        return tok

    def parse(self):
        node = self.expression(0)
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.value!r}", tok.pos, self.text)
        return node

    def expression(self, rbp: int):
        left = self.prefix()
        while True:
            tok = self.peek()
            if tok.kind != "op" or tok.value not in _BINARY:
                return left
            lbp = _BINARY[tok.value]
            if lbp <= rbp:
                return left
            self.advance()
            if tok.value == "^":
                # right associative; the exponent may carry its own sign
                right = self.expression(lbp - 1)
            else:
                right = self.expression(lbp)
            left = (tok.value, tok.pos, left, right)

    def prefix(self):
        tok = self.advance()
        if tok.kind == "num":
            return ("num", tok.pos, int(tok.value))
        if tok.kind == "name":
            if tok.value == "sqrt":
                self.expect("(")
                arg = self.expression(0)
                self.expect(")")
                return ("sqrt", tok.pos, arg)
            if tok.value in INDEX and tok.value != "u" or tok.value in ("t", "i"):
                return ("name", tok.pos, tok.value)
            raise ParseError(f"unknown identifier {tok.value!r}", tok.pos, self.text)
        if tok.kind == "op":
            if tok.value == "(":
                node = self.expression(0)
                self.expect(")")
                return node
            if tok.value in "+-":
                # unary minus binds looser than ^ so that -x^2 = -(x^2)
                operand = self.expression(25)
                return ("neg", tok.pos, operand) if tok.value == "-" else operand
        got = tok.value or "end of input"
        raise ParseError(f"unexpected {got!r}", tok.pos, self.text)


def parse_ast(text: str):
    return _Parser(text).parse()


# evaluation into Laurent dictionaries (u exponent may go negative)


def _mono(k: int, e: int = 1) -> tuple:
    m = [0] * NV
    m[k] = e
    return tuple(m)


def _constant_of(d: dict):
    """Return the scalar if d has no O-variables and no u, else None."""
    if not d:
        return Fraction(0)
    if len(d) == 1 and ZERO_EXP in d:
        return d[ZERO_EXP]
    return None


def _u_monomial(d: dict):
    """(coefficient, k) if d is c*u^k with no O-variables, else None."""
    if len(d) != 1:
        return None
    (m, c), = d.items()
    if any(m[:U]):
        return None
    return c, m[U]


def _rational_exponent(d: dict, pos: int, text: str) -> Fraction:
    c = _constant_of(d)
    if c is None or isinstance(c, QuadTowerScalar):
        raise ParseError("exponent must be a rational constant", pos, text)
    return Fraction(c)


class _Evaluator:
    def __init__(self, text: str, u0: Fraction | None):
        self.text = text
        self.u0 = u0

    def err(self, msg, pos):
        return ParseError(msg, pos, self.text)

    def u_power(self, k: int) -> dict:
        if self.u0 is None:
            return {_mono(U, k): Fraction(1)}
        return {ZERO_EXP: self.u0 ** k}

    def is_t(self, node) -> int | None:
        """u-exponent for syntactic powers of t: t -> 12, sqrt(t) -> 6."""
        if node[0] == "name" and node[2] == "t":
            return 12
        if node[0] == "sqrt" and node[2][0] == "name" and node[2][2] == "t":
            return 6
        return None

    def eval(self, node) -> dict:
        tag, pos = node[0], node[1]
        if tag == "num":
            return {ZERO_EXP: Fraction(node[2])} if node[2] else {}
        if tag == "name":
            name = node[2]
            if name == "t":
                return self.u_power(12)
            if name == "i":
                return {ZERO_EXP: QuadTowerScalar.sqrt(-1)}
            return {_mono(INDEX[name]): Fraction(1)}
        if tag == "neg":
            return {m: -c for m, c in self.eval(node[2]).items()}
        if tag == "sqrt":
            return self.sqrt(node[2], pos)
        a, b = node[2], node[3]
        if tag == "+":
            d = self.eval(a)
            _add_into(d, self.eval(b))
            return d
        if tag == "-":
            d = self.eval(a)
            _add_into(d, self.eval(b), -1)
            return d
        if tag == "*":
            return _mul(self.eval(a), self.eval(b))
        if tag == "/":
            return self.divide(self.eval(a), self.eval(b), node[3][1])
        if tag == "^":
            return self.power(a, b, pos)
        raise AssertionError(tag)

    def sqrt(self, arg, pos) -> dict:
        if self.is_t(arg) == 12:
            return self.u_power(6)
        d = self.eval(arg)
        c = _constant_of(d)
        if c is not None and not isinstance(c, QuadTowerScalar):
            c = Fraction(c)
            try:
                root = QuadTowerScalar.sqrt(c.numerator * c.denominator) / c.denominator
            except ValueError as exc:
                raise self.err(str(exc), pos) from None
            return {ZERO_EXP: root} if root else {}
        raise self.err("sqrt accepts integers, rationals and t only", pos)

    def divide(self, num: dict, den: dict, pos) -> dict:
        c = _constant_of(den)
        if c is not None:
            if not c:
                raise self.err("division by zero", pos)
            inv = c.inverse() if isinstance(c, QuadTowerScalar) else 1 / Fraction(c)
            return {m: v * inv for m, v in num.items()}
        um = _u_monomial(den)
        if um is not None:
            c, k = um
            inv = c.inverse() if isinstance(c, QuadTowerScalar) else 1 / Fraction(c)
            return _mul(num, {_mono(U, -k): inv})
        raise self.err("division only by nonzero constant expressions", pos)

    def power(self, base_node, exp_node, pos) -> dict:
        q = _rational_exponent(self.eval(exp_node), exp_node[1], self.text)
        tk = self.is_t(base_node)
        if tk is not None:
            k = q * tk
            if k.denominator != 1:
                raise self.err("fractional power of t must be a multiple of 1/12", pos)
            return self.u_power(int(k))
        base = self.eval(base_node)
        if self.u0 is None:
            um = _u_monomial(base)
            if um is not None and um[0] == 1:
                k = q * um[1]
                if k.denominator != 1:
                    raise self.err("fractional power of t must be a multiple of 1/12", pos)
                return {_mono(U, int(k)): Fraction(1)}
        if q.denominator != 1:
            raise self.err("only powers of t may have fractional exponents", pos)
        n = int(q)
        if n < 0:
            c = _constant_of(base)
            um = _u_monomial(base)
            if c is None and um is None:
                raise self.err("negative powers only of constants", pos)
            base = self.divide({ZERO_EXP: Fraction(1)}, base, pos)
            n = -n
        result = {ZERO_EXP: Fraction(1)}
        for _ in range(n):
            result = _mul(result, base)
        return result


@dataclass(frozen=True)
class ParseResult:
    poly: Polynomial
    multiplier: int  # the expression equals poly * u^(-multiplier)

    def at(self, u0) -> Polynomial:
        """The expression's value with u specialized to u0."""
        u0 = Fraction(u0)
        return self.poly.specialize_u(u0) * (u0 ** -self.multiplier)


def parse_expr(text: str, u0=None) -> ParseResult:
    """Parse ``text``; ``u0=None`` keeps u symbolic, otherwise u := u0."""
    if u0 is not None:
        u0 = Fraction(u0)
        if u0 == 0:
            raise ValueError("u0 must be nonzero")
    d = _Evaluator(text, u0).eval(parse_ast(text))
    shift = 0
    if d:
        shift = max(0, -min(m[U] for m in d))
    if shift:
        d = {m[:U] + (m[U] + shift,): c for m, c in d.items()}
    return ParseResult(Polynomial._from_dict(d), shift)


def parse_poly(text: str, u0=None) -> Polynomial:
    return parse_expr(text, u0).poly


def parse_equation(text: str, u0=None) -> list[ParseResult]:
    """Split ``a = b = c`` into the differences a - b, b - c.

    A side equal to ``0`` is allowed; a lone expression is returned as is.
    """
    sides = text.split("=")
    if any(not s.strip() for s in sides):
        raise ParseError("empty side in equation", text.find("="), text)
    if len(sides) == 1:
        return [parse_expr(text, u0)]
    parsed = [parse_expr(s, u0) for s in sides]
    out = []
    for a, b in zip(parsed, parsed[1:]):
        k = max(a.multiplier, b.multiplier)
        ua = _u_shift(a.poly, k - a.multiplier)
        ub = _u_shift(b.poly, k - b.multiplier)
        out.append(ParseResult(ua - ub, k))
    return out


def _u_shift(p: Polynomial, k: int) -> Polynomial:
    if not k:
        return p
    return Polynomial._from_dict({m[:U] + (m[U] + k,): c for m, c in p.terms}, p.order)


__all__ = ["ParseError", "ParseResult", "parse_expr", "parse_poly", "parse_equation", "tokenize", "O_VARS"]
