"""Mapping class group action: twist maps, word composition and numeric checks.

Word convention: atoms act left to right.  Composing the word [a, b] first
substitutes with a and then substitutes b into the result, so the image of
O is b applied to a(O).  On points this means b's point map is applied
before a's.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .daha import ParameterSpec, T1, relation_set
from .parser import parse_poly
from .groebner import GBLimits, ReducedGB, buchberger, ideal_member
from .poly import DEGREVLEX, NO, O_VARS, LimitExceeded, Polynomial, SizeLimits, SubstitutionMap, substitute

_ROTATION = {
    "O1": "O2", "O2": "O3", "O3": "O4", "O4": "O5", "O5": "O6", "O6": "O1",
    "O12": "O23", "O23": "O34", "O34": "O45", "O45": "O56", "O56": "O61", "O61": "O12",
    "O123": "O234", "O234": "O345", "O345": "O123",
}

_D1 = {
    "O2": "O1*O2 - O12",
    "O6": "O61",
    "O12": "O2",
    "O23": "O1*O23 - O123",
    "O56": "O234",
    "O61": "O1*O61 - O6",
    "O123": "O23",
    "O234": "O1*O234 - O56",
}

_D1_INV = {
    "O2": "O12",
    "O6": "O1*O6 - O61",
    "O12": "O1*O12 - O2",
    "O23": "O123",
    "O56": "O1*O56 - O234",
    "O61": "O6",
    "O123": "O1*O123 - O23",
    "O234": "O56",
}

_Z2 = {
    "O1": "O2",
    "O2": "O1*O2 - O12",
    "O3": "O5*O6 - O56",
    "O4": "O5",
    "O5": "O45",
    "O6": "O23",
    "O12": "O1*(O2^2 - 1) - O2*O12",
    "O23": "O3*O4 - O34",
    "O34": "(O5^2 - 1)*O6 - O5*O56",
    "O45": "O4",
    "O56": "O23*O45 - O61",
    "O61": "O3",
    "O123": "O4*O23 - O234",
    "O234": "O3*O45 - O345",
    "O345": "(O2*O5 + O34*O61 - O234*O345)/2",
}

_Z3 = {
    "O1": "O1*O2 - O12",
    "O2": "O3",
    "O3": "O4",
    "O4": "O5*O61 - O234",
    "O5": "O61",
    "O6": "-O6 + O1*O61",
    "O12": "O1*O23 - O123",
    "O23": "O34",
    "O34": "-O23 + O45*O61",
    "O45": "O5",
    "O56": "-O6*O61 + O1*(O61^2 - 1)",
    "O61": "O345",
    "O123": "-O56 + O1*O234",
    "O234": "-O2 + O61*O345",
    "O345": "O45",
}

_Z4 = {
    "O1": "O2",
    "O2": "O3",
    "O3": "O4",
    "O4": "O5*O6 - O56",
    "O5": "O6",
    "O6": "O61",
    "O12": "O23",
    "O23": "O34",
    "O34": "O6*O45 - O123",
    "O45": "O5",
    "O56": "-O1 + O6*O61",
    "O61": "O345",
    "O123": "O234",
    "O234": "-O12 + O6*O345",
    "O345": "O45",
}

ATOMS = tuple(
    [f"d{k}" for k in range(1, 6)]
    + [f"d{k}i" for k in range(1, 6)]
    + ["I", "Ii", "z0", "z1", "z2", "z3", "z4"]
)
INVERSES = {**{f"d{k}": f"d{k}i" for k in range(1, 6)}, **{f"d{k}i": f"d{k}" for k in range(1, 6)},
            "I": "Ii", "Ii": "I", "z0": "z0", "z1": "Ii"}


def _table(entries: dict, name: str) -> SubstitutionMap:
    return SubstitutionMap({k: parse_poly(v) for k, v in entries.items()}, name)


@lru_cache(maxsize=None)
def twist_map(atom: str) -> SubstitutionMap:
    """Substitution map of a catalog atom."""
    if atom == "z0":
        return SubstitutionMap.identity()
    if atom in ("I", "z1"):
        return _table(_ROTATION, atom)
    if atom == "Ii":
        return _table({v: k for k, v in _ROTATION.items()}, atom)
    if atom == "d1":
        return _table(_D1, atom)
    if atom == "d1i":
        return _table(_D1_INV, atom)
    if atom in ("z2", "z3", "z4"):
        return _table({"z2": _Z2, "z3": _Z3, "z4": _Z4}[atom], atom)
    if atom in ATOMS and atom.startswith("d"):
        # d_k = I^(k-1) d_1 I^(1-k)
        k = int(atom[1])
        base = "d1i" if atom.endswith("i") else "d1"
        m = compose_word(TwistWord(("Ii",) * (k - 1) + (base,) + ("I",) * (k - 1)))
        return SubstitutionMap(m.images, atom)
    raise KeyError(f"unknown atom {atom!r}")


@dataclass(frozen=True)
class TwistWord:
    atoms: tuple = ()

    def __post_init__(self):
        bad = [a for a in self.atoms if a not in ATOMS]
        if bad:
            raise KeyError(f"unknown atom(s) {bad}; known atoms: {', '.join(ATOMS)}")

    @classmethod
    def parse(cls, text: str) -> "TwistWord":
        """'d1,d2,d1' or 'id' (the identity word)."""
        text = text.strip()
        if text in ("id", "identity", ""):
            return cls(())
        return cls(tuple(a.strip() for a in text.split(",")))

    def inverse(self) -> "TwistWord":
        out = []
        for a in reversed(self.atoms):
            if a in INVERSES:
                out.append(INVERSES[a])
            else:
                raise ValueError(f"no catalog inverse for {a}")
        return TwistWord(tuple(out))

    def __str__(self):
        return ",".join(self.atoms) if self.atoms else "id"

    def __len__(self):
        return len(self.atoms)


def _as_word(w) -> TwistWord:
    if isinstance(w, TwistWord):
        return w
    if isinstance(w, str):
        return TwistWord.parse(w)
    return TwistWord(tuple(w))


def compose_word(w, limits: SizeLimits | None = None, growth: list | None = None) -> SubstitutionMap:
    """Composite substitution map of a word (first atom applied first).

    ``growth`` collects the maximal image degree after each atom.
    """
    w = _as_word(w)
    limits = limits or SizeLimits()
    m = SubstitutionMap.identity()
    for atom in w.atoms:
        m = m.then(twist_map(atom), limits)
        if m.term_count() > limits.max_terms:
            raise LimitExceeded("terms", f"word {w} grew to {m.term_count()} terms")
        if growth is not None:
            growth.append(m.max_degree())
    return SubstitutionMap(m.images, str(w))


# numeric evaluation


class NumericSystem:
    """Vectorized evaluation of a list of polynomials in the O-variables."""

    def __init__(self, polys: Sequence[Polynomial]):
        exps, coeffs, owner = [], [], []
        for k, p in enumerate(polys):
            for m, c in p.terms:
                if any(m[NO:]):
                    raise ValueError("u must be specialized for numeric evaluation")
                exps.append(m[:NO])
                coeffs.append(complex(c))
                owner.append(k)
        self.n = len(polys)
        self.exps = np.array(exps, dtype=np.int64).reshape(-1, NO)
        self.coeffs = np.array(coeffs, dtype=complex)
        self.owner = np.array(owner, dtype=np.int64)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        out = np.zeros(self.n, dtype=complex)
        if len(self.coeffs):
            vals = self.coeffs * np.prod(x[None, :] ** self.exps, axis=1)
            np.add.at(out, self.owner, vals)
        return out


@lru_cache(maxsize=32)
def _relation_system(u0: Fraction):
    rels = relation_set(ParameterSpec(u0)).relations
    f = NumericSystem(rels)
    jac = NumericSystem([r.diff(n) for r in rels for n in O_VARS])
    return f, jac


def relation_residuals(x, p: ParameterSpec = T1) -> np.ndarray:
    f, _ = _relation_system(p.u0)
    return f(x)


def relation_jacobian(x, p: ParameterSpec = T1) -> np.ndarray:
    _, jac = _relation_system(p.u0)
    return jac(x).reshape(-1, NO)


@dataclass(frozen=True)
class NumericPoint:
    coords: tuple
    residual: float
    seed: int
    attempt: int = 0

    def as_array(self) -> np.ndarray:
        return np.array(self.coords, dtype=complex)

    def as_dict(self) -> dict:
        return dict(zip(O_VARS, self.coords))


class SamplerError(RuntimeError):
    pass


def _newton(x, F, J, tol: float, max_iter: int = 200):
    """Gauss-Newton with Tikhonov damping; returns (x, residual)."""
    lam = 1e-2
    f = F(x)
    r = np.max(np.abs(f))
    polish = 0
    for _ in range(max_iter):
        if r <= tol:
            # a few extra steps push the residual towards machine precision
            polish += 1
            if polish > 4 or r < 1e-14:
                break
        A = np.vstack([J(x), np.sqrt(lam) * np.eye(len(x))])
        b = np.concatenate([-f, np.zeros(len(x))])
        dx = np.linalg.lstsq(A, b, rcond=None)[0]
        x_new = x + dx
        f_new = F(x_new)
        r_new = np.max(np.abs(f_new))
        if np.isfinite(r_new) and r_new < r:
            x, f, r = x_new, f_new, r_new
            lam = max(lam / 5, 1e-14)
        else:
            if r <= tol:
                break
            lam *= 4
            if lam > 1e8:
                break
    return x, float(r)


def _random_start(seed: int, attempt: int, radius: float = 3.0) -> np.ndarray:
    """Uniform sample of the ball of the given radius in C^15."""
    rng = np.random.default_rng([seed, attempt])
    z = rng.standard_normal(2 * NO)
    z *= radius * rng.random() ** (1 / (2 * NO)) / np.linalg.norm(z)
    return z[:NO] + 1j * z[NO:]


def _solve(F, J, seed, tol, retries, start=None):
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    if start is not None:
        x, r = _newton(np.asarray(start, dtype=complex), F, J, tol)
        if r <= tol:
            return NumericPoint(tuple(complex(v) for v in x), r, seed, -1)
    for attempt in range(retries):
        x, r = _newton(_random_start(seed, attempt), F, J, tol)
        if r <= tol:
            return NumericPoint(tuple(complex(v) for v in x), r, seed, attempt)
    raise SamplerError(f"no convergence to {tol} after {retries} starts (seed {seed})")


def sample_variety_point(p: ParameterSpec = T1, seed: int = 42, tol: float = 1e-10,
                         retries: int = 20, start=None) -> NumericPoint:
    """A numeric point on the relation variety, deterministic in ``seed``."""
    if p.symbolic:
        raise ValueError("sampling needs a specialized u0")
    return _solve(lambda x: relation_residuals(x, p), lambda x: relation_jacobian(x, p),
                  seed, tol, retries, start)


def sample_common_zero(polys: Sequence[Polynomial], seed: int = 42, tol: float = 1e-10,
                       retries: int = 20) -> NumericPoint:
    """A numeric common zero of arbitrary polynomials in the O-variables."""
    F = NumericSystem(polys)
    Js = NumericSystem([f.diff(n) for f in polys for n in O_VARS])
    return _solve(F, lambda x: Js(x).reshape(-1, NO), seed, tol, retries)


class IndeterminateRank(RuntimeError):
    pass


def matrix_rank(M, rank_tol: float = 1e-8, gap: float = 10.0) -> int:
    """Numeric rank with a required singular-value gap at the cut."""
    M = np.asarray(M)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s[0] == 0:
        return 0
    rank = int(np.sum(s > rank_tol * s[0]))
    if rank < len(s) and s[rank] > 0 and s[rank - 1] / s[rank] < gap:
        raise IndeterminateRank(f"singular values {s[rank - 1]:.3e} and {s[rank]:.3e} are not separated")
    return rank


def jacobian_rank(pt, p: ParameterSpec = T1, rank_tol: float = 1e-8) -> int:
    x = pt.as_array() if isinstance(pt, NumericPoint) else np.asarray(pt, dtype=complex)
    return matrix_rank(relation_jacobian(x, p), rank_tol)


def map_point(m: SubstitutionMap, x) -> np.ndarray:
    """Evaluate the image polynomials of m at x."""
    return NumericSystem(m.images)(x)


def apply_word_to_point(w, x) -> np.ndarray:
    """Point action of a word computed atom by atom (last atom first)."""
    x = np.asarray(x, dtype=complex)
    for atom in reversed(_as_word(w).atoms):
        x = map_point(twist_map(atom), x)
    return x


@dataclass
class ActionReport:
    lhs: str
    rhs: str
    mode: str
    verdict: str
    differences: list = field(default_factory=list)
    image_residuals: list = field(default_factory=list)
    degree_growth: dict = field(default_factory=dict)
    seeds: list = field(default_factory=list)
    tol: float = 1e-8
    detail: str = ""

    def table(self) -> str:
        lines = [f"lhs = {self.lhs}", f"rhs = {self.rhs}", f"mode = {self.mode}"]
        if self.mode == "numeric":
            lines.append(f"{'sample':>6} {'seed':>6} {'max|lhs-rhs|':>14} {'max relation':>14}")
            for k, (d, r, s) in enumerate(zip(self.differences, self.image_residuals, self.seeds)):
                lines.append(f"{k:>6} {s:>6} {d:>14.3e} {r:>14.3e}")
        for side, g in self.degree_growth.items():
            lines.append(f"degree growth {side}: {g}")
        if self.detail:
            lines.append(self.detail)
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines)


def verify_on_samples(lhs, rhs, n: int = 5, p: ParameterSpec = T1, seed: int = 42, tol: float = 1e-8,
                      limits: SizeLimits | None = None) -> ActionReport:
    """Compare two words on n sampled variety points."""
    if n < 1:
        raise ValueError("need at least one sample")
    lhs, rhs = _as_word(lhs), _as_word(rhs)
    grow_l, grow_r = [], []
    ml = compose_word(lhs, limits, grow_l)
    mr = compose_word(rhs, limits, grow_r)
    fl, fr = NumericSystem(ml.images), NumericSystem(mr.images)
    report = ActionReport(str(lhs), str(rhs), "numeric", "PASS", tol=tol,
                          degree_growth={"lhs": grow_l, "rhs": grow_r})
    for k in range(n):
        pt = sample_variety_point(p, seed + k)
        x = pt.as_array()
        yl, yr = fl(x), fr(x)
        diff = float(np.max(np.abs(yl - yr)))
        res = float(max(np.max(np.abs(relation_residuals(yl, p))), np.max(np.abs(relation_residuals(yr, p)))))
        report.differences.append(diff)
        report.image_residuals.append(res)
        report.seeds.append(seed + k)
        if not (diff <= tol and res <= tol):
            report.verdict = "FAIL"
    return report


@lru_cache(maxsize=8)
def relation_gb(u0: Fraction = Fraction(1), limits: GBLimits | None = None) -> ReducedGB:
    """Reduced Groebner basis (degrevlex) of the 19 relations at u = u0."""
    return buchberger(relation_set(ParameterSpec(u0)).relations, DEGREVLEX, limits)


def verify_symbolic(lhs, rhs, p: ParameterSpec = T1, limits: SizeLimits | None = None,
                    gb_limits: GBLimits | None = None) -> ActionReport:
    """Exact comparison of the two composed maps.

    Maps that differ as polynomial maps are compared again modulo the
    relation ideal, which is where group relations live.
    """
    lhs, rhs = _as_word(lhs), _as_word(rhs)
    grow_l, grow_r = [], []
    ml = compose_word(lhs, limits, grow_l)
    mr = compose_word(rhs, limits, grow_r)
    report = ActionReport(str(lhs), str(rhs), "symbolic", "PASS",
                          degree_growth={"lhs": grow_l, "rhs": grow_r})
    if ml == mr:
        report.detail = "identical polynomial maps"
        return report
    gb = relation_gb(p.u0, gb_limits)
    bad = [n for n, a, b in zip(O_VARS, ml.images, mr.images) if not ideal_member(a - b, gb)]
    if bad:
        report.verdict = "FAIL"
        report.detail = f"images differ modulo the relations at {', '.join(bad)}"
    else:
        report.detail = "images agree modulo the relations"
    return report


def preserves_relations(atom, p: ParameterSpec = T1, gb_limits: GBLimits | None = None) -> list[str]:
    """Labels of relations whose pull-back is not in the relation ideal (empty if preserved)."""
    m = compose_word(_as_word(atom))
    rels = relation_set(p)
    gb = relation_gb(p.u0, gb_limits)
    return [lab for lab, r in zip(rels.labels, rels.relations) if not ideal_member(substitute(r, m), gb)]


def preserves_variety(atom: str, points: Iterable[NumericPoint], p: ParameterSpec = T1,
                      tol: float = 1e-8) -> list[float]:
    """Relation residuals at the images of the points under an atom."""
    m = twist_map(atom)
    f = NumericSystem(m.images)
    return [float(np.max(np.abs(relation_residuals(f(pt.as_array()), p)))) for pt in points]


HYPERELLIPTIC = TwistWord(("d1", "d2", "d3", "d4", "d5", "d5", "d4", "d3", "d2", "d1"))
