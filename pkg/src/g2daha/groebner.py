"""Buchberger's algorithm over Q with fraction-free integer reduction.

Monomials are packed into Python ints with 16-bit fields (bit 15 of each
field is a guard bit).  The field layout depends on the term order so that
``packed ^ xmask`` compares exactly like the order, multiplication is
addition, and divisibility is a single guard-bit test.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .poly import DEGREVLEX, INDEX, NO, NV, O_VARS, U, LimitExceeded, Polynomial, TermOrder
from .scalars import QuadTowerScalar

W = 16
FIELD = (1 << W) - 1
GUARD_BIT = 1 << (W - 1)


class EmptyVariety(ValueError):
    """Raised when a dimension is requested for the unit ideal."""


@dataclass(frozen=True)
class GBLimits:
    max_pairs: int = 100_000
    max_degree: int = 64
    max_terms: int = 100_000
    timeout: float = 600.0

    def __post_init__(self):
        if min(self.max_pairs, self.max_degree, self.max_terms) <= 0 or self.timeout <= 0:
            raise ValueError("GB limits must be positive")


@dataclass
class GBStats:
    pairs_processed: int = 0
    pairs_skipped: int = 0
    zero_reductions: int = 0
    max_degree: int = 0
    basis_size: int = 0

    def as_dict(self) -> dict:
        return {
            "pairs_processed": self.pairs_processed,
            "pairs_skipped": self.pairs_skipped,
            "zero_reductions": self.zero_reductions,
            "max_degree": self.max_degree,
            "basis_size": self.basis_size,
        }


class _Layout:
    """Packing of exponent vectors for one term order."""

    def __init__(self, order: TermOrder):
        if order.nvars != NV:
            raise ValueError(f"term order must rank all {NV} variables")
        p = order.priority
        if order.kind == "lex":
            groups = [(None, list(p))]
        elif order.kind == "degrevlex":
            groups = [("deg", list(reversed(p)))]
        else:
            s = order.split
            groups = [("deg", list(reversed(p[:s]))), ("deg", list(reversed(p[s:])))]
        nfields = sum(len(g) + (d is not None) for d, g in groups)
        shift = W * nfields
        self.var_shift = [0] * NV
        self.deg_fields = []
        xmask = 0
        for deg, vars_ in groups:
            if deg is not None:
                shift -= W
                self.deg_fields.append((shift, tuple(vars_)))
            for v in vars_:
                shift -= W
                self.var_shift[v] = shift
                if deg is not None:
                    xmask |= FIELD << shift
        self.xmask = xmask
        self.guard = sum(GUARD_BIT << (W * k) for k in range(nfields))
        self._unpack: dict = {}

    def pack(self, e: Sequence[int]) -> int:
        m = 0
        for v, x in enumerate(e):
            if x:
                if x >= GUARD_BIT:
                    raise LimitExceeded("degree", "exponent too large to pack")
                m |= x << self.var_shift[v]
        for shift, vars_ in self.deg_fields:
            d = sum(e[v] for v in vars_)
            if d >= GUARD_BIT:
                raise LimitExceeded("degree", "degree too large to pack")
            m |= d << shift
        return m

    def unpack(self, m: int) -> tuple:
        e = self._unpack.get(m)
        if e is None:
            e = tuple((m >> s) & FIELD for s in self.var_shift)
            self._unpack[m] = e
        return e

    def divides(self, a: int, b: int) -> bool:
        """True iff monomial a divides monomial b."""
        g = self.guard
        return ((b | g) - a) & g == g

    def lcm(self, a: int, b: int) -> int:
        ea, eb = self.unpack(a), self.unpack(b)
        return self.pack([x if x > y else y for x, y in zip(ea, eb)])

    def degree(self, m: int) -> int:
        return sum(self.unpack(m))

    def support(self, m: int) -> int:
        bits = 0
        for v, x in enumerate(self.unpack(m)):
            if x:
                bits |= 1 << v
        return bits


class _Poly:
    """Internal integer polynomial: terms sorted descending, primitive."""

    __slots__ = ("terms", "lm", "lc", "deg", "supp")

    def __init__(self, terms: list, layout: _Layout):
        self.terms = terms
        self.lm, self.lc = terms[0]
        self.deg = max(layout.degree(m) for m, _ in terms)
        self.supp = layout.support(self.lm)


def _content(values: Iterable[int]) -> int:
    g = 0
    for v in values:
        g = math.gcd(g, v)
        if g == 1:
            return 1
    return g


def _sorted_terms(d: dict, xmask: int) -> list:
    return sorted(d.items(), key=lambda t: t[0] ^ xmask, reverse=True)


def _primitive(terms: list) -> list:
    g = _content(c for _, c in terms)
    if terms[0][1] < 0:
        g = -g
    if g != 1:
        terms = [(m, c // g) for m, c in terms]
    return terms


class _Reducer:
    """Fraction-free multivariate division against a list of _Poly."""

    def __init__(self, layout: _Layout, deadline: float | None = None):
        self.layout = layout
        self.deadline = deadline

    def find(self, m: int, basis: Sequence[_Poly]):
        divides = self.layout.divides
        for g in basis:
            if divides(g.lm, m):
                return g
        return None

    def reduce(self, f: dict, basis: Sequence[_Poly], full: bool = True):
        """Return (remainder dict, scale) with remainder = scale * NF(f)."""
        xmask = self.layout.xmask
        heap = [-(m ^ xmask) for m in f]
        heapq.heapify(heap)
        queued = set(f)
        rem: dict = {}
        scale = Fraction(1)
        steps = 0
        while heap:
            m = -heapq.heappop(heap) ^ xmask
            queued.discard(m)
            c = f.pop(m, None)
            if c is None:
                continue
            g = self.find(m, basis) if basis else None
            if g is None:
                rem[m] = c
                if not full:
                    for k, v in f.items():
                        rem[k] = v
                    break
                continue
            steps += 1
            if steps % 256 == 0 and self.deadline is not None and time.monotonic() > self.deadline:
                raise LimitExceeded("timeout", "during reduction")
            h = math.gcd(c, g.lc)
            fa, fc = g.lc // h, c // h
            if fa != 1:
                for k in f:
                    f[k] *= fa
                for k in rem:
                    rem[k] *= fa
                scale *= fa
            shift = m - g.lm
            it = iter(g.terms)
            next(it)
            for gm, gc in it:
                k = gm + shift
                v = f.get(k)
                if v is None:
                    f[k] = -fc * gc
                    if k not in queued:
                        queued.add(k)
                        heapq.heappush(heap, -(k ^ xmask))
                else:
                    v -= fc * gc
                    if v:
                        f[k] = v
                    else:
                        del f[k]
            if fa != 1 and steps % 16 == 0:
                cont = _content(itertools.chain(f.values(), rem.values()))
                if cont > 1:
                    for k in f:
                        f[k] //= cont
                    for k in rem:
                        rem[k] //= cont
                    scale /= cont
        return rem, scale


def _to_int_terms(p: Polynomial, layout: _Layout) -> tuple[dict, Fraction]:
    """Integer polynomial dict and the factor a with dict = a * p."""
    d = {}
    den = 1
    for _, c in p.terms:
        if isinstance(c, QuadTowerScalar):
            raise TypeError("Groebner computations need rational coefficients")
        den = den * c.denominator // math.gcd(den, c.denominator)
    for m, c in p.terms:
        d[layout.pack(m)] = int(c * den)
    return d, Fraction(den)


def _from_int_terms(d: dict, layout: _Layout, scale=Fraction(1), order: TermOrder = DEGREVLEX) -> Polynomial:
    return Polynomial._from_dict({layout.unpack(m): Fraction(c) / scale for m, c in d.items()}, order)


def _make_basis(polys: Sequence[Polynomial], layout: _Layout) -> list[_Poly]:
    out = []
    for p in polys:
        if p.is_zero():
            continue
        d, _ = _to_int_terms(p, layout)
        out.append(_Poly(_primitive(_sorted_terms(d, layout.xmask)), layout))
    return out


@dataclass(frozen=True)
class ReducedGB:
    basis: tuple
    order: TermOrder = DEGREVLEX
    stats: GBStats = field(default_factory=GBStats, compare=False)

    def is_unit(self) -> bool:
        return any(p.is_constant() for p in self.basis)

    def leading_monomials(self) -> list[tuple]:
        return [p.leading_term(self.order)[0] for p in self.basis]

    def normal_form(self, f: Polynomial) -> Polynomial:
        return normal_form(f, self.basis, self.order)

    def contains(self, f: Polynomial) -> bool:
        return ideal_member(f, self)

    def __len__(self):
        return len(self.basis)

    def __iter__(self):
        return iter(self.basis)


def normal_form(f: Polynomial, basis: Sequence[Polynomial], order: TermOrder = DEGREVLEX) -> Polynomial:
    """Remainder of f on division by ``basis`` (in the given order)."""
    if f.is_zero():
        return f.with_order(order)
    layout = _Layout(order)
    gs = _make_basis(basis, layout)
    d, a = _to_int_terms(f, layout)
    rem, scale = _Reducer(layout).reduce(d, gs)
    return _from_int_terms(rem, layout, scale * a, order)


def s_polynomial(f: Polynomial, g: Polynomial, order: TermOrder = DEGREVLEX) -> Polynomial:
    """(L/LT(f)) f - (L/LT(g)) g with L the lcm of the leading monomials."""
    if f.is_zero() or g.is_zero():
        raise ValueError("S-polynomial of the zero polynomial")
    mf, cf = f.leading_term(order)
    mg, cg = g.leading_term(order)
    lcm = tuple(max(a, b) for a, b in zip(mf, mg))
    uf = Polynomial._from_dict({tuple(a - b for a, b in zip(lcm, mf)): 1 / cf}, order)
    ug = Polynomial._from_dict({tuple(a - b for a, b in zip(lcm, mg)): 1 / cg}, order)
    return (uf * f.with_order(order) - ug * g.with_order(order)).with_order(order)


class _Buchberger:
    def __init__(self, layout: _Layout, limits: GBLimits):
        self.layout = layout
        self.limits = limits
        self.deadline = time.monotonic() + limits.timeout
        self.reducer = _Reducer(layout, self.deadline)
        self.polys: list[_Poly] = []
        self.alive: list[int] = []
        self.pairs: list = []
        self.stats = GBStats()

    def lcm(self, i: int, j: int) -> int:
        return self.layout.lcm(self.polys[i].lm, self.polys[j].lm)

    def coprime(self, i: int, j: int) -> bool:
        return not (self.polys[i].supp & self.polys[j].supp)

    def add(self, p: _Poly):
        """Gebauer-Moeller update with the new element p."""
        lay = self.layout
        h = len(self.polys)
        self.polys.append(p)
        self.stats.max_degree = max(self.stats.max_degree, p.deg)
        cands = [(g, self.lcm(h, g)) for g in self.alive]
        kept = []
        for idx, (g1, l1) in enumerate(cands):
            if self.coprime(h, g1):
                kept.append((g1, l1))
                continue
            others = itertools.chain(cands[idx + 1 :], kept)
            if not any(lay.divides(l2, l1) for _, l2 in others):
                kept.append((g1, l1))
        new_pairs = []
        for g, l in kept:
            if self.coprime(h, g):
                self.stats.pairs_skipped += 1
            else:
                new_pairs.append((g, l))
        lm_h = p.lm
        survivors = []
        for entry in self.pairs:
            _, i, j, l = entry
            if lay.divides(lm_h, l) and self.lcm(i, h) != l and self.lcm(j, h) != l:
                self.stats.pairs_skipped += 1
            else:
                survivors.append(entry)
        for g, l in new_pairs:
            survivors.append((lay.degree(l), g, h, l))
        heapq.heapify(survivors)
        self.pairs = survivors
        self.alive = [g for g in self.alive if not lay.divides(lm_h, self.polys[g].lm)] + [h]

    def spoly(self, i: int, j: int, l: int) -> dict:
        f, g = self.polys[i], self.polys[j]
        h = math.gcd(f.lc, g.lc)
        a, b = g.lc // h, f.lc // h
        sf, sg = l - f.lm, l - g.lm
        d: dict = {}
        for m, c in f.terms[1:]:
            d[m + sf] = a * c
        for m, c in g.terms[1:]:
            k = m + sg
            v = d.get(k, 0) - b * c
            if v:
                d[k] = v
            else:
                d.pop(k, None)
        return d

    def reduce_new(self, d: dict):
        if not d:
            return None
        rem, _ = self.reducer.reduce(d, [self.polys[k] for k in self.alive])
        if not rem:
            return None
        terms = _primitive(_sorted_terms(rem, self.layout.xmask))
        p = _Poly(terms, self.layout)
        if p.deg > self.limits.max_degree:
            raise LimitExceeded("degree", f"basis element of degree {p.deg}")
        if len(terms) > self.limits.max_terms:
            raise LimitExceeded("terms", f"basis element with {len(terms)} terms")
        return p

    def run(self, gens: list[_Poly]) -> list[_Poly]:
        for g in gens:
            p = self.reduce_new(dict(g.terms))
            if p is not None:
                if p.lm == 0:
                    return [p]
                self.add(p)
        while self.pairs:
            if time.monotonic() > self.deadline:
                raise LimitExceeded("timeout", f"after {self.stats.pairs_processed} pairs")
            if self.stats.pairs_processed >= self.limits.max_pairs:
                raise LimitExceeded("pairs", f"{self.stats.pairs_processed} pairs processed")
            _, i, j, l = heapq.heappop(self.pairs)
            self.stats.pairs_processed += 1
            p = self.reduce_new(self.spoly(i, j, l))
            if p is None:
                self.stats.zero_reductions += 1
                continue
            if p.lm == 0:
                return [p]
            self.add(p)
        return [self.polys[k] for k in self.alive]


def _interreduce(basis: list[_Poly], layout: _Layout) -> list[_Poly]:
    reducer = _Reducer(layout)
    out = []
    basis = sorted(basis, key=lambda p: p.lm ^ layout.xmask)
    for k, p in enumerate(basis):
        others = basis[:k] + basis[k + 1 :]
        rem, scale = reducer.reduce(dict(p.terms[1:]), others)
        # rem = scale * NF(tail); the leading term is irreducible by minimality
        terms = {p.lm: p.lc * scale.numerator}
        for m, c in rem.items():
            terms[m] = c * scale.denominator
        out.append(_Poly(_primitive(_sorted_terms(terms, layout.xmask)), layout))
    return out


def buchberger(gens: Sequence[Polynomial], order: TermOrder = DEGREVLEX, limits: GBLimits | None = None) -> ReducedGB:
    """Reduced Groebner basis of the ideal generated by ``gens``."""
    limits = limits or GBLimits()
    layout = _Layout(order)
    engine = _Buchberger(layout, limits)
    basis = engine.run(_make_basis(gens, layout))
    if basis and basis[0].lm == 0:
        basis = basis[:1]
    else:
        basis = _interreduce(basis, layout)
    stats = engine.stats
    stats.basis_size = len(basis)
    polys = []
    for p in sorted(basis, key=lambda q: q.lm ^ layout.xmask):
        polys.append(Polynomial._from_dict({layout.unpack(m): Fraction(c, p.lc) for m, c in p.terms}, order))
    return ReducedGB(tuple(polys), order, stats)


def groebner(gens: Sequence[Polynomial], order: TermOrder = DEGREVLEX, limits: GBLimits | None = None) -> ReducedGB:
    return buchberger(gens, order, limits)


def ideal_member(f: Polynomial, gb: ReducedGB) -> bool:
    if f.is_zero():
        return True
    if not gb.basis:
        return False
    return normal_form(f, gb.basis, gb.order).is_zero()


def ideal_contains(A: Sequence[Polynomial], B: Sequence[Polynomial], order: TermOrder = DEGREVLEX,
                   limits: GBLimits | None = None) -> bool:
    """ideal(B) is a subset of ideal(A)."""
    gb = buchberger(A, order, limits)
    return all(ideal_member(b, gb) for b in B)


def ideal_equal(A: Sequence[Polynomial], B: Sequence[Polynomial], order: TermOrder = DEGREVLEX,
                limits: GBLimits | None = None) -> bool:
    ga = buchberger(A, order, limits)
    gb = buchberger(B, order, limits)
    return ga.basis == gb.basis


def _free_slot(polys: Sequence[Polynomial]) -> int:
    """The u slot, used as an auxiliary variable once u is specialized."""
    for p in polys:
        if any(m[U] for m, _ in p.terms):
            raise ValueError("u must be specialized before Groebner computations")
    return U


def _aux(k: int) -> Polynomial:
    e = [0] * NV
    e[k] = 1
    return Polynomial._from_dict({tuple(e): Fraction(1)})


def radical_member(f: Polynomial, gens: Sequence[Polynomial], limits: GBLimits | None = None) -> bool:
    """f lies in the radical of ideal(gens) (Rabinowitsch trick)."""
    y = _aux(_free_slot(list(gens) + [f]))
    gb = buchberger(list(gens) + [1 - y * f], DEGREVLEX, limits)
    return gb.is_unit()


def eliminate(gens: Sequence[Polynomial], keep: Iterable[str], limits: GBLimits | None = None) -> list[Polynomial]:
    """Generators of ideal(gens) intersected with Q[keep]."""
    keep = set(keep)
    unknown = keep - set(O_VARS)
    if unknown:
        raise KeyError(f"unknown variables {sorted(unknown)}")
    drop = [n for n in O_VARS if n not in keep] + ["u"]
    order = TermOrder.block(drop)
    gb = buchberger(gens, order, limits)
    keep_idx = {INDEX[n] for n in keep}
    out = []
    for p in gb.basis:
        if all(k in keep_idx for m, _ in p.terms for k, e in enumerate(m) if e):
            out.append(p.with_order(DEGREVLEX))
    return out


def saturate(gens: Sequence[Polynomial], f: Polynomial, limits: GBLimits | None = None) -> list[Polynomial]:
    """Generators of the saturation ideal(gens) : f^infinity."""
    slot = _free_slot(list(gens) + [f])
    y = _aux(slot)
    order = TermOrder("block", (slot,) + tuple(k for k in range(NV) if k != slot), 1)
    gb = buchberger(list(gens) + [1 - y * f], order, limits)
    return [p.with_order(DEGREVLEX) for p in gb.basis if not any(m[slot] for m, _ in p.terms)]


def ideal_dimension(gb: ReducedGB) -> int:
    """Krull dimension from the leading monomials (independent-set method)."""
    if gb.is_unit():
        raise EmptyVariety("1 is in the ideal: the variety is empty")
    supports = []
    for m in gb.leading_monomials():
        if m[U]:
            raise ValueError("u must be specialized before computing dimensions")
        bits = 0
        for k in range(NO):
            if m[k]:
                bits |= 1 << k
        supports.append(bits)
    relevant = sorted({k for s in supports for k in range(NO) if s >> k & 1})
    # smallest set of variables meeting every leading monomial's support
    for size in range(len(relevant) + 1):
        for combo in itertools.combinations(relevant, size):
            hit = 0
            for k in combo:
                hit |= 1 << k
            if all(s & hit for s in supports):
                return NO - size
    raise AssertionError("unreachable")


def check_reduced(gb: ReducedGB) -> bool:
    """Post-hoc check: all S-polynomials reduce to zero and the basis is reduced."""
    basis = list(gb.basis)
    for f, g in itertools.combinations(basis, 2):
        if not normal_form(s_polynomial(f, g, gb.order), basis, gb.order).is_zero():
            return False
    for k, p in enumerate(basis):
        if p.leading_term(gb.order)[1] != 1:
            return False
        others = basis[:k] + basis[k + 1 :]
        if others and normal_form(p, others, gb.order) != p:
            return False
    return True
