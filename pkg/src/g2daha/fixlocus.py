"""Registry of claimed fixed-locus components and their verification."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import jsonschema

from . import __version__
from .daha import ParameterSpec, evaluate_relations, relation_set
from .groebner import (
    EmptyVariety,
    GBLimits,
    ReducedGB,
    buchberger,
    ideal_dimension,
    ideal_equal,
    ideal_member,
    saturate,
)
from .mcg import (
    IndeterminateRank,
    SamplerError,
    TwistWord,
    compose_word,
    jacobian_rank,
    sample_variety_point,
)
from .parser import ParseError, ParseResult, parse_equation, parse_expr
from .poly import NO, O_VARS, LimitExceeded, Polynomial, SizeLimits, var
from .scalars import QuadTowerScalar

PASS, FAIL, NOT_VERIFIED, SKIPPED, NA = "PASS", "FAIL", "NOT-VERIFIED", "SKIPPED", "N/A"
CHECKS = ("VANISHING", "DIMENSION", "INVARIANCE", "CONTAINMENT")
DEFAULT_TDEF_U0 = Fraction(3, 2)

SCHEMA = {
    "type": "object",
    "required": ["subgroups", "components"],
    "properties": {
        "subgroups": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "iso", "order", "ramification"],
                "properties": {
                    "label": {"type": "string"},
                    "iso": {"type": "string"},
                    "order": {"type": "integer"},
                    "ramification": {"type": "string"},
                    "equivalent_to": {"type": "string"},
                    "equivalent_iso": {"type": "string"},
                    "equivalent_order": {"type": "integer"},
                    "equivalent_ramification": {"type": "string"},
                    "action_words": {
                        "type": "array",
                        "items": {"type": "array", "items": {"type": "string"}},
                    },
                },
                "additionalProperties": False,
            },
        },
        "components": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["subgroup", "fiber", "name", "kind", "provenance"],
                "properties": {
                    "subgroup": {"type": "string"},
                    "fiber": {"enum": ["t1", "tdef"]},
                    "name": {"type": "string"},
                    "kind": {"enum": ["ideal", "point", "ambiguous"]},
                    "dim": {"type": "integer", "minimum": 0},
                    "generators": {"type": "array", "items": {"type": "string"}},
                    "point": {"type": "object", "additionalProperties": {"type": "string"}},
                    "provenance": {"type": "string", "minLength": 1},
                    "note": {"type": "string"},
                    "saturate": {"type": "array", "items": {"enum": list(O_VARS)}},
                    "completed": {"type": "array", "items": {"enum": list(O_VARS)}},
                    "displaced": {"type": "boolean"},
                    "whole_variety": {"type": "boolean"},
                },
                "additionalProperties": False,
            },
        },
    },
}


class RegistryError(ValueError):
    pass


@dataclass(frozen=True)
class SubgroupRecord:
    label: str
    iso: str
    order: int
    ramification: str
    action_words: tuple = ()
    equivalent_to: str | None = None
    equivalent_iso: str | None = None
    equivalent_order: int | None = None
    equivalent_ramification: str | None = None

    @property
    def has_action(self) -> bool:
        return bool(self.action_words)


@dataclass(frozen=True)
class ClaimedComponent:
    subgroup: str
    fiber: str
    name: str
    kind: str
    dim: int | None
    provenance: str
    generators: tuple = ()
    point: tuple = ()  # (variable, expression text) pairs
    note: str = ""
    saturate: tuple = ()
    completed: tuple = ()
    displaced: bool = False
    whole_variety: bool = False
    parsed_generators: tuple = field(default=(), compare=False, repr=False)
    parsed_point: tuple = field(default=(), compare=False, repr=False)

    @property
    def key(self) -> tuple:
        return (self.subgroup, self.fiber, self.name)

    def generators_at(self, u0) -> list[Polynomial]:
        return [r.at(u0) for r in self.parsed_generators]

    def point_at(self, u0) -> dict:
        out = {}
        for name, r in self.parsed_point:
            c = r.at(u0).constant_value()
            out[name] = c if isinstance(c, QuadTowerScalar) else QuadTowerScalar.rational(c)
        return out

    def expressions(self) -> list[str]:
        if self.kind == "point":
            return [f"{n} = {e}" for n, e in self.point]
        return list(self.generators)


@dataclass(frozen=True)
class Registry:
    subgroups: dict
    components: tuple
    source: str = ""

    def subgroup(self, label: str) -> SubgroupRecord:
        try:
            return self.subgroups[label]
        except KeyError:
            raise KeyError(f"unknown subgroup {label!r}") from None

    def components_of(self, label: str, fiber: str | None = None) -> list[ClaimedComponent]:
        return [c for c in self.components if c.subgroup == label and (fiber is None or c.fiber == fiber)]

    def counts(self) -> dict:
        kinds: dict = {}
        for c in self.components:
            kinds[c.kind] = kinds.get(c.kind, 0) + 1
        return {"subgroups": len(self.subgroups), "components": len(self.components), **kinds}


def default_registry_path():
    return resources.files("g2daha") / "data" / "registry.json"


def _parse_component(raw: dict, where: str) -> ClaimedComponent:
    kind = raw["kind"]
    gens, parsed_gens = tuple(raw.get("generators", ())), []
    for k, text in enumerate(gens):
        try:
            parsed_gens.extend(parse_equation(text))
        except ParseError as exc:
            raise RegistryError(f"{where}/generators/{k}: {exc}") from None
    point, parsed_point = (), []
    if "point" in raw:
        point = tuple(raw["point"].items())
        for name, text in point:
            if name not in O_VARS:
                raise RegistryError(f"{where}/point: unknown variable {name!r}")
            try:
                r = parse_expr(text)
            except ParseError as exc:
                raise RegistryError(f"{where}/point/{name}: {exc}") from None
            if any(any(m[:NO]) for m, _ in r.poly.terms):
                raise RegistryError(f"{where}/point/{name}: value is not a constant")
            parsed_point.append((name, r))
    if kind == "point":
        missing = [n for n in O_VARS if n not in dict(point)]
        if missing:
            raise RegistryError(f"{where}/point: missing coordinates {missing}")
    if kind == "ideal" and "dim" not in raw:
        raise RegistryError(f"{where}: ideal components need 'dim'")
    if kind == "ideal" and not gens and not raw.get("whole_variety"):
        raise RegistryError(f"{where}: ideal components need generators")
    return ClaimedComponent(
        subgroup=raw["subgroup"],
        fiber=raw["fiber"],
        name=raw["name"],
        kind=kind,
        dim=raw.get("dim"),
        provenance=raw["provenance"],
        generators=gens,
        point=point,
        note=raw.get("note", ""),
        saturate=tuple(raw.get("saturate", ())),
        completed=tuple(raw.get("completed", ())),
        displaced=bool(raw.get("displaced", False)),
        whole_variety=bool(raw.get("whole_variety", False)),
        parsed_generators=tuple(parsed_gens),
        parsed_point=tuple(parsed_point),
    )


def load_registry(path=None) -> Registry:
    """Load and validate a registry file (the shipped one by default)."""
    path = default_registry_path() if path is None else Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise RegistryError(f"cannot read registry {path}: {exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RegistryError(f"{path}: invalid JSON: {exc}") from None
    try:
        jsonschema.validate(raw, SCHEMA)
    except jsonschema.ValidationError as exc:
        loc = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise RegistryError(f"{path}: schema violation at {loc}: {exc.message}") from None

    subgroups = {}
    for k, s in enumerate(raw["subgroups"]):
        if s["label"] in subgroups:
            raise RegistryError(f"subgroups/{k}: duplicate label {s['label']!r}")
        try:
            words = tuple(TwistWord(tuple(w)) for w in s.get("action_words", ()))
        except KeyError as exc:
            raise RegistryError(f"subgroups/{k}/action_words: {exc}") from None
        subgroups[s["label"]] = SubgroupRecord(
            label=s["label"], iso=s["iso"], order=s["order"], ramification=s["ramification"],
            action_words=words, equivalent_to=s.get("equivalent_to"), equivalent_iso=s.get("equivalent_iso"),
            equivalent_order=s.get("equivalent_order"), equivalent_ramification=s.get("equivalent_ramification"),
        )
    comps, seen = [], set()
    for k, c in enumerate(raw["components"]):
        where = f"components/{k}"
        if c["subgroup"] not in subgroups:
            raise RegistryError(f"{where}/subgroup: unknown subgroup {c['subgroup']!r}")
        comp = _parse_component(c, where)
        if comp.key in seen:
            raise RegistryError(f"{where}: duplicate component {comp.key}")
        seen.add(comp.key)
        comps.append(comp)
    return Registry(subgroups, tuple(comps), str(path))


def fiber_parameter(fiber: str, tdef_u0=DEFAULT_TDEF_U0) -> ParameterSpec:
    if fiber == "t1":
        return ParameterSpec(Fraction(1))
    if fiber == "tdef":
        return ParameterSpec(Fraction(tdef_u0))
    raise ValueError(f"unknown fiber {fiber!r}")


def constraint_generators(words: Iterable, limits: SizeLimits | None = None) -> list[Polynomial]:
    """Nonzero phi(O_k) - O_k for every word phi and generator O_k."""
    out = []
    for w in words:
        m = compose_word(w, limits)
        for name, img in zip(O_VARS, m.images):
            d = img - var(name)
            if not d.is_zero():
                out.append(d)
    return out


def constraint_ideal(words: Iterable, p: ParameterSpec, limits: SizeLimits | None = None) -> list[Polynomial]:
    """Fixed-point constraints of the words together with the 19 relations."""
    return constraint_generators(words, limits) + list(relation_set(p).relations)


@dataclass
class CheckResult:
    verdict: str
    detail: str = ""


@dataclass
class ComponentReport:
    subgroup: str
    fiber: str
    name: str
    kind: str
    u0: Fraction
    claimed_dim: int | None
    computed_dim: object = None  # int, "empty" or None
    checks: dict = field(default_factory=dict)
    info: dict = field(default_factory=dict)
    budget: dict = field(default_factory=dict)
    provenance: str = ""
    notes: list = field(default_factory=list)
    expressions: list = field(default_factory=list)

    @property
    def key(self) -> tuple:
        return (self.subgroup, self.fiber, self.name)

    @property
    def overall(self) -> str:
        verdicts = [c.verdict for c in self.checks.values() if c.verdict != NA]
        if not verdicts or all(v == SKIPPED for v in verdicts):
            return SKIPPED
        if FAIL in verdicts:
            return FAIL
        if NOT_VERIFIED in verdicts:
            return NOT_VERIFIED
        return PASS

    def as_dict(self) -> dict:
        return {
            "subgroup": self.subgroup,
            "fiber": self.fiber,
            "component": self.name,
            "kind": self.kind,
            "u0": str(self.u0),
            "claimed_dim": self.claimed_dim,
            "computed_dim": self.computed_dim,
            "overall": self.overall,
            "checks": {k: {"verdict": v.verdict, "detail": v.detail} for k, v in self.checks.items()},
            "info": self.info,
            "budget": self.budget,
            "provenance": self.provenance,
            "notes": self.notes,
            "expressions": self.expressions,
        }


@dataclass(frozen=True)
class VerifyOptions:
    gb_limits: GBLimits = GBLimits()
    size_limits: SizeLimits = SizeLimits()
    seed: int = 42
    tol: float = 1e-8
    samples: int = 3
    relation_dimension: bool = True  # informational dim of (claimed + relations)


def _dim_or_empty(gb: ReducedGB):
    try:
        return ideal_dimension(gb)
    except EmptyVariety:
        return "empty"


def _words(rec: SubgroupRecord) -> list:
    return [w for w in rec.action_words if len(w)]


def _verify_point(c: ClaimedComponent, rec: SubgroupRecord, p: ParameterSpec, rep: ComponentReport,
                  opts: VerifyOptions):
    pt = c.point_at(p.u0)
    rels = relation_set(p)
    vals = evaluate_relations(pt, p, rels)
    bad = [lab for lab, v in zip(rels.labels, vals) if not v.is_zero()]
    if bad:
        worst = max(abs(v.to_complex()) for v in vals)
        rep.checks["VANISHING"] = CheckResult(FAIL, f"{19 - len(bad)}/19 relations vanish; nonzero: "
                                              f"{', '.join(bad)} (max |value| {worst:.3g})")
    else:
        rep.checks["VANISHING"] = CheckResult(PASS, "all 19 relations evaluate to exact zero")
    rep.computed_dim = 0
    rep.checks["DIMENSION"] = (CheckResult(PASS, "a point has dimension 0") if c.dim in (0, None)
                               else CheckResult(FAIL, f"point claimed with dimension {c.dim}"))
    rep.info["relations_vanishing"] = 19 - len(bad)
    words = _words(rec)
    if not words:
        rep.checks["INVARIANCE"] = CheckResult(NA, "no action words configured")
        rep.checks["CONTAINMENT"] = CheckResult(NA, "no action words configured")
        return
    moved = []
    for w in words:
        m = compose_word(w, opts.size_limits)
        for name, img in zip(O_VARS, m.images):
            if img.evaluate(pt) != pt[name]:
                moved.append(f"{w}:{name}")
    if moved:
        rep.checks["INVARIANCE"] = CheckResult(FAIL, f"point moved at {', '.join(moved)}")
    else:
        rep.checks["INVARIANCE"] = CheckResult(PASS, "point fixed by every action word")
    ok = not moved and not bad
    rep.checks["CONTAINMENT"] = CheckResult(
        PASS if ok else FAIL,
        "all constraint generators vanish at the point" if ok else "some constraint generators do not vanish",
    )


def _verify_whole(c: ClaimedComponent, rec: SubgroupRecord, p: ParameterSpec, rep: ComponentReport,
                  opts: VerifyOptions):
    extra = constraint_generators(rec.action_words, opts.size_limits)
    if extra:
        rep.checks["VANISHING"] = CheckResult(FAIL, f"{len(extra)} nonzero constraint generators; the fixed "
                                              "locus is cut by more than the relations")
    else:
        rep.checks["VANISHING"] = CheckResult(PASS, "constraint part is zero; the ideal is the relation ideal")
    ranks = []
    try:
        for k in range(opts.samples):
            pt = sample_variety_point(p, opts.seed + k)
            ranks.append(jacobian_rank(pt, p, opts.tol))
    except (SamplerError, IndeterminateRank) as exc:
        rep.checks["DIMENSION"] = CheckResult(NOT_VERIFIED, f"numeric rank unavailable: {exc}")
    else:
        local = sorted({NO - r for r in ranks})
        rep.computed_dim = local[0] if len(local) == 1 else local
        ok = local == [c.dim]
        rep.checks["DIMENSION"] = CheckResult(
            PASS if ok else FAIL,
            f"Jacobian ranks {ranks} at seeds {opts.seed}..{opts.seed + opts.samples - 1}; local dimension "
            f"{', '.join(map(str, local))}",
        )
        rep.info["jacobian_ranks"] = ranks
    if opts.relation_dimension:
        try:
            gb = buchberger(relation_set(p).relations, limits=opts.gb_limits)
            rep.info["gb_dimension"] = _dim_or_empty(gb)
            rep.budget["pairs"] = gb.stats.pairs_processed
        except LimitExceeded as exc:
            rep.info["gb_dimension"] = f"not computed ({exc.which} limit)"
    if _words(rec) and not extra:
        rep.checks["INVARIANCE"] = CheckResult(PASS, "action words act as the identity")
        rep.checks["CONTAINMENT"] = CheckResult(PASS, "constraint ideal equals the relation ideal")
    elif _words(rec):
        rep.checks["INVARIANCE"] = CheckResult(NOT_VERIFIED, "non-trivial words on the whole variety")
        rep.checks["CONTAINMENT"] = CheckResult(NOT_VERIFIED, "non-trivial words on the whole variety")
    else:
        rep.checks["INVARIANCE"] = CheckResult(NA, "no action words configured")
        rep.checks["CONTAINMENT"] = CheckResult(NA, "no action words configured")


def _verify_ideal(c: ClaimedComponent, rec: SubgroupRecord, p: ParameterSpec, rep: ComponentReport,
                  opts: VerifyOptions):
    gens = c.generators_at(p.u0)
    if any(g.domain() != "Q" for g in gens):
        for name in CHECKS:
            rep.checks[name] = CheckResult(NOT_VERIFIED, "generators are not rational after specialization")
        return
    pairs = 0
    try:
        for v in c.saturate:
            gens = saturate(gens, var(v), opts.gb_limits)
        gb = buchberger(gens, limits=opts.gb_limits)
        pairs += gb.stats.pairs_processed
    except LimitExceeded as exc:
        for name in CHECKS:
            rep.checks[name] = CheckResult(NOT_VERIFIED, f"GB {exc.which} limit exceeded")
        rep.budget["aborted"] = exc.which
        return
    rels = relation_set(p)
    members = [ideal_member(r, gb) for r in rels.relations]
    missing = [lab for lab, ok in zip(rels.labels, members) if not ok]
    rep.info["relations_in_ideal"] = sum(members)
    if missing:
        rep.checks["VANISHING"] = CheckResult(FAIL, f"{sum(members)}/19 relations reduce to 0; not in the ideal: "
                                              f"{', '.join(missing)}")
    else:
        rep.checks["VANISHING"] = CheckResult(PASS, "all 19 relations reduce to 0" +
                                              (" (vacuously: 1 is in the ideal)" if gb.is_unit() else ""))
    dim = _dim_or_empty(gb)
    rep.computed_dim = dim
    if dim == "empty":
        rep.checks["DIMENSION"] = CheckResult(FAIL, "1 is in the ideal: the claimed generators have no common zero")
    else:
        rep.checks["DIMENSION"] = CheckResult(PASS if dim == c.dim else FAIL, f"dimension {dim}, claimed {c.dim}")
    rep.info["basis_size"] = len(gb)
    words = _words(rec)
    if words:
        moved, outside = [], []
        for w in words:
            m = compose_word(w, opts.size_limits)
            for k, g in enumerate(gens):
                if not ideal_member(g.substitute(m, opts.size_limits), gb):
                    moved.append(f"{w}:g{k + 1}")
            for name, img in zip(O_VARS, m.images):
                if not ideal_member(img - var(name), gb):
                    outside.append(f"{w}:{name}")
        if moved or outside:
            rep.checks["INVARIANCE"] = CheckResult(FAIL, "not invariant: " + ", ".join(moved + outside))
        else:
            rep.checks["INVARIANCE"] = CheckResult(PASS, "mapped generators and fixed-point constraints reduce to 0")
        ok = not outside and not missing
        rep.checks["CONTAINMENT"] = CheckResult(
            PASS if ok else FAIL,
            "claimed component lies in the fixed locus" if ok else
            f"{len(outside)} fixed-point constraints and {len(missing)} relations outside the ideal",
        )
    else:
        rep.checks["INVARIANCE"] = CheckResult(NA, "no action words configured")
        rep.checks["CONTAINMENT"] = CheckResult(NA, "no action words configured")
    if opts.relation_dimension:
        try:
            gbj = buchberger(gens + list(rels.relations), limits=opts.gb_limits)
            pairs += gbj.stats.pairs_processed
            rep.info["dim_with_relations"] = _dim_or_empty(gbj)
        except LimitExceeded as exc:
            rep.info["dim_with_relations"] = f"not computed ({exc.which} limit)"
    rep.budget["pairs"] = pairs


def verify_component(c: ClaimedComponent, reg: Registry, p: ParameterSpec,
                     opts: VerifyOptions | None = None) -> ComponentReport:
    """Run the applicable checks for one claimed component."""
    opts = opts or VerifyOptions()
    if p.symbolic:
        raise ValueError("verification needs a specialized u0")
    rec = reg.subgroup(c.subgroup)
    rep = ComponentReport(c.subgroup, c.fiber, c.name, c.kind, p.u0, c.dim, provenance=c.provenance,
                          expressions=c.expressions())
    if c.note:
        rep.notes.append(c.note)
    if c.displaced:
        rep.notes.append("displaced display")
    if c.kind == "ambiguous":
        for name in CHECKS:
            rep.checks[name] = CheckResult(SKIPPED, "ambiguous generator set")
        return rep
    try:
        if c.kind == "point":
            _verify_point(c, rec, p, rep, opts)
        elif c.whole_variety:
            _verify_whole(c, rec, p, rep, opts)
        else:
            _verify_ideal(c, rec, p, rep, opts)
    except LimitExceeded as exc:
        for name in CHECKS:
            if name not in rep.checks:
                rep.checks[name] = CheckResult(NOT_VERIFIED, f"{exc.which} limit exceeded")
        rep.budget["aborted"] = exc.which
    return rep


@dataclass
class SubgroupReport:
    label: str
    fiber: str
    components: list

    @property
    def containment(self) -> dict:
        return {c.name: c.checks.get("CONTAINMENT") for c in self.components}

    @property
    def overall(self) -> str:
        verdicts = [c.overall for c in self.components]
        for v in (FAIL, NOT_VERIFIED, PASS):
            if v in verdicts:
                return v
        return SKIPPED


def verify_subgroup(label: str, fiber: str, reg: Registry, p: ParameterSpec | None = None,
                    opts: VerifyOptions | None = None) -> SubgroupReport:
    reg.subgroup(label)
    p = p or fiber_parameter(fiber)
    comps = reg.components_of(label, fiber)
    return SubgroupReport(label, fiber, [verify_component(c, reg, p, opts) for c in comps])


@dataclass
class EquivalenceEntry:
    first: str
    second: str
    status: str
    detail: str


def equivalence_pairs(reg: Registry) -> list[tuple]:
    return [(s.label, s.equivalent_to) for s in reg.subgroups.values() if s.equivalent_to]


def equivalence_report(pairs: Sequence[tuple], reg: Registry, p: ParameterSpec,
                       opts: VerifyOptions | None = None) -> list[EquivalenceEntry]:
    """Bookkeeping for subgroups the source pairs with a shared ideal family."""
    opts = opts or VerifyOptions()
    out = []
    for a, b in pairs:
        ra, rb = reg.subgroups.get(a), reg.subgroups.get(b)
        if ra is None and rb is None:
            raise KeyError(f"neither {a!r} nor {b!r} is registered")
        if ra is not None and rb is not None and _words(ra) and _words(rb):
            try:
                same = ideal_equal(constraint_ideal(ra.action_words, p, opts.size_limits),
                                   constraint_ideal(rb.action_words, p, opts.size_limits), limits=opts.gb_limits)
            except LimitExceeded as exc:
                out.append(EquivalenceEntry(a, b, NOT_VERIFIED, f"GB {exc.which} limit exceeded"))
                continue
            out.append(EquivalenceEntry(a, b, "EQUAL" if same else "DIFFERENT",
                                        "constraint ideals compared by reduced Groebner bases"))
            continue
        owner = ra or rb
        n = len(reg.components_of(owner.label))
        out.append(EquivalenceEntry(a, b, "METADATA-ONLY",
                                    f"shared ideal family: the {n} registered components of {owner.label}"))
    return out


# reports

COLUMNS = ("subgroup", "fiber", "component", "kind", "claimed_dim", "computed_dim", "dim_with_relations",
           "vanishing", "dimension", "invariance", "containment", "overall", "relations", "pairs",
           "provenance", "notes", "expressions")


def _row(r: ComponentReport) -> dict:
    rel = r.info.get("relations_in_ideal", r.info.get("relations_vanishing", ""))
    return {
        "subgroup": r.subgroup,
        "fiber": r.fiber,
        "component": r.name,
        "kind": r.kind,
        "claimed_dim": "" if r.claimed_dim is None else r.claimed_dim,
        "computed_dim": "" if r.computed_dim is None else r.computed_dim,
        "dim_with_relations": r.info.get("dim_with_relations", r.info.get("gb_dimension", "")),
        "vanishing": r.checks.get("VANISHING", CheckResult(NA)).verdict,
        "dimension": r.checks.get("DIMENSION", CheckResult(NA)).verdict,
        "invariance": r.checks.get("INVARIANCE", CheckResult(NA)).verdict,
        "containment": r.checks.get("CONTAINMENT", CheckResult(NA)).verdict,
        "overall": r.overall,
        "relations": "" if rel == "" else f"{rel}/19",
        "pairs": r.budget.get("pairs", ""),
        "provenance": r.provenance,
        "notes": "; ".join(r.notes),
        "expressions": "; ".join(r.expressions),
    }


def summarize(reports: Sequence[ComponentReport]) -> dict:
    out = {v: 0 for v in (PASS, FAIL, NOT_VERIFIED, SKIPPED)}
    for r in reports:
        out[r.overall] += 1
    return out


def emit_report(reports: Sequence[ComponentReport], fmt: str = "md", meta: dict | None = None,
                equivalences: Sequence[EquivalenceEntry] = ()) -> str:
    """Render reports deterministically (ordered by subgroup, fiber, component)."""
    reports = sorted(reports, key=lambda r: r.key)
    meta = {"tool": "g2daha", "version": __version__, **(meta or {})}
    summary = summarize(reports)
    if fmt == "json":
        doc = {
            "meta": meta,
            "summary": summary,
            "components": [r.as_dict() for r in reports],
            "equivalences": [vars(e) for e in equivalences],
        }
        return json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\r\n", quoting=csv.QUOTE_ALL)
        w.writeheader()
        for r in reports:
            w.writerow(_row(r))
        return buf.getvalue()
    if fmt in ("md", "markdown"):
        lines = ["# Fixed-locus verification report", ""]
        for k, v in meta.items():
            lines.append(f"- {k}: {v}")
        lines.append("- summary: " + ", ".join(f"{k} {v}" for k, v in summary.items()))
        lines.append("")
        cols = COLUMNS[:-1]
        lines.append("| " + " | ".join(cols) + " |")
        lines.append("|" + "---|" * len(cols))
        for r in reports:
            row = _row(r)
            lines.append("| " + " | ".join(str(row[c]).replace("|", "\\|") for c in cols) + " |")
        if reports:
            lines += ["", "## Check details", ""]
            for r in reports:
                lines.append(f"### {r.subgroup} {r.fiber} {r.name}: {r.overall}")
                for name, chk in r.checks.items():
                    lines.append(f"- {name}: {chk.verdict}" + (f" ({chk.detail})" if chk.detail else ""))
                for k, v in sorted(r.info.items()):
                    lines.append(f"- info {k}: {v}")
                lines.append("")
        if equivalences:
            lines += ["## Equivalences", ""]
            for e in equivalences:
                lines.append(f"- {e.first} / {e.second}: {e.status} ({e.detail})")
        return "\n".join(lines).rstrip("\n") + "\n"
    raise ValueError(f"unknown report format {fmt!r}")
