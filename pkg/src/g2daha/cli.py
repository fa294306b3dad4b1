"""Command-line front end: ``g2daha verify-all | action | gb | relations | map``."""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .daha import ParameterSpec, relation_set
from .fixlocus import (
    DEFAULT_TDEF_U0,
    FAIL,
    NOT_VERIFIED,
    RegistryError,
    VerifyOptions,
    emit_report,
    equivalence_pairs,
    equivalence_report,
    fiber_parameter,
    load_registry,
    summarize,
    verify_component,
)
from .groebner import EmptyVariety, GBLimits, buchberger, ideal_dimension
from .mcg import TwistWord, compose_word, verify_on_samples, verify_symbolic
from .parser import ParseError, parse_equation
from .poly import O_VARS, LimitExceeded, SizeLimits, TermOrder

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3

WORD_HELP = ("Words are comma-separated atoms (d1..d5, d1i..d5i, I, Ii, z0..z4) or 'id'. "
             "They act left to right: the first atom is applied first.")


class InputError(Exception):
    pass


def _rational(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from None
    if value == 0:
        raise argparse.ArgumentTypeError("u0 must be nonzero")
    return value


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


@dataclass(frozen=True)
class RunConfig:
    u0: Fraction | None
    seed: int
    tol: float
    gb_limits: GBLimits
    size_limits: SizeLimits
    fmt: str
    out: str | None
    registry: str | None

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        gb = GBLimits(max_pairs=args.max_pairs, max_degree=args.max_degree, timeout=args.timeout)
        return cls(args.u0, args.seed, args.tol, gb, SizeLimits(max_degree=args.max_degree),
                   args.format, args.out, args.registry)

    def options(self) -> VerifyOptions:
        return VerifyOptions(gb_limits=self.gb_limits, size_limits=self.size_limits, seed=self.seed, tol=self.tol)


def _write(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {out}: {exc}") from None


def _verify_task(task):
    comp, reg, u0, opts = task
    return verify_component(comp, reg, fiber_parameter(comp.fiber, u0), opts)


def cmd_verify_all(args) -> int:
    cfg = RunConfig.from_args(args)
    tdef_u0 = cfg.u0 if cfg.u0 is not None else DEFAULT_TDEF_U0
    try:
        reg = load_registry(cfg.registry)
    except RegistryError as exc:
        raise InputError(str(exc)) from None
    if args.subgroup is not None and args.subgroup not in reg.subgroups:
        raise InputError(f"unknown subgroup {args.subgroup!r}")
    comps = [c for c in reg.components
             if (args.subgroup is None or c.subgroup == args.subgroup)
             and (args.fiber is None or c.fiber == args.fiber)]
    opts = cfg.options()
    tasks = [(c, reg, tdef_u0, opts) for c in comps]
    if args.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_verify_task, tasks))
    else:
        reports = [_verify_task(t) for t in tasks]

    pairs = [(a, b) for a, b in equivalence_pairs(reg) if args.subgroup in (None, a, b)]
    equivalences = equivalence_report(pairs, reg, fiber_parameter("t1"), opts)
    meta = {
        "registry": "shipped" if cfg.registry is None else cfg.registry,
        "u0 (t=1 fiber)": 1,
        "u0 (t-deformed fiber)": str(tdef_u0),
        "seed": cfg.seed,
        "tol": cfg.tol,
        "max_pairs": cfg.gb_limits.max_pairs,
        "max_degree": cfg.gb_limits.max_degree,
        "timeout": cfg.gb_limits.timeout,
    }
    _write(emit_report(reports, cfg.fmt, meta, equivalences), cfg.out)
    counts = summarize(reports)
    print("summary: " + ", ".join(f"{k} {v}" for k, v in counts.items()), file=sys.stderr)
    if counts[NOT_VERIFIED]:
        print(f"warning: {counts[NOT_VERIFIED]} component(s) not verified within the budget", file=sys.stderr)
    return EXIT_FAIL if counts[FAIL] else EXIT_OK


def _word(text: str) -> TwistWord:
    try:
        return TwistWord.parse(text)
    except KeyError as exc:
        raise InputError(str(exc.args[0])) from None


def cmd_action(args) -> int:
    cfg = RunConfig.from_args(args)
    lhs, rhs = _word(args.lhs), _word(args.rhs)
    p = ParameterSpec(cfg.u0 if cfg.u0 is not None else 1)
    if args.mode == "symbolic":
        report = verify_symbolic(lhs, rhs, p, cfg.size_limits, cfg.gb_limits)
    else:
        report = verify_on_samples(lhs, rhs, args.n, p, cfg.seed, cfg.tol, cfg.size_limits)
    _write(report.table() + "\n", cfg.out)
    return EXIT_OK if report.verdict == "PASS" else EXIT_FAIL


def _read_generators(path: str, u0) -> list:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    gens = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip().rstrip(",")
        if not line:
            continue
        try:
            gens.extend(r.poly for r in parse_equation(line, u0))
        except ParseError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
    if not gens:
        raise InputError(f"{path}: no generators")
    return gens


def cmd_gb(args) -> int:
    cfg = RunConfig.from_args(args)
    u0 = cfg.u0 if cfg.u0 is not None else Fraction(1)
    gens = _read_generators(args.file, u0)
    order = {"degrevlex": TermOrder.degrevlex(), "lex": TermOrder.lex()}[args.order]
    gb = buchberger(gens, order, cfg.gb_limits)
    lines = [f"# reduced Groebner basis ({args.order}, u0={u0}), {len(gb)} element(s)"]
    lines += [str(g) for g in gb]
    try:
        lines.append(f"dimension: {ideal_dimension(gb)}")
    except EmptyVariety:
        lines.append("dimension: empty variety (1 is in the ideal)")
    lines.append(f"pairs processed: {gb.stats.pairs_processed}")
    _write("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def cmd_relations(args) -> int:
    p = ParameterSpec(None if args.symbolic else (args.u0 if args.u0 is not None else 1))
    rels = relation_set(p)
    lines = [f"# {len(rels)} relations, {p}"]
    for lab, r, k in zip(rels.labels, rels.relations, rels.multipliers):
        suffix = f"    (cleared by u^{k})" if k else ""
        lines.append(f"{lab}: {r} = 0{suffix}")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_map(args) -> int:
    cfg = RunConfig.from_args(args)
    w = _word(args.word)
    m = compose_word(w, cfg.size_limits)
    lines = [f"# images under {w}"]
    lines += [f"{name} -> {img}" for name, img in zip(O_VARS, m.images)]
    _write("\n".join(lines) + "\n", cfg.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--u0", type=_rational, default=None,
                        help="rational value of u = t^(1/12); verify-all uses it for the t-deformed "
                             "fiber (default 3/2), other commands default to 1")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--tol", type=_positive_float, default=1e-8)
    common.add_argument("--format", choices=("md", "csv", "json"), default="md")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--max-pairs", type=_positive_int, default=100_000)
    common.add_argument("--max-degree", type=_positive_int, default=64)
    common.add_argument("--timeout", type=_positive_float, default=600.0, help="seconds per Groebner basis")
    common.add_argument("--registry", default=None, help="registry JSON (default: the shipped one)")

    ap = argparse.ArgumentParser(prog="g2daha", description=__doc__, epilog=WORD_HELP)
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify-all", parents=[common], help="verify every registered component")
    v.add_argument("--subgroup", default=None)
    v.add_argument("--fiber", choices=("t1", "tdef"), default=None)
    v.add_argument("--jobs", type=_positive_int, default=1)
    v.set_defaults(func=cmd_verify_all)

    a = sub.add_parser("action", parents=[common], help="compare two words", epilog=WORD_HELP)
    a.add_argument("--lhs", required=True)
    a.add_argument("--rhs", default="id")
    a.add_argument("--mode", choices=("numeric", "symbolic"), default="numeric")
    a.add_argument("--n", type=_positive_int, default=5, help="number of sampled points")
    a.set_defaults(func=cmd_action)

    g = sub.add_parser("gb", parents=[common], help="Groebner basis of the ideal in FILE ('-' for stdin)")
    g.add_argument("file")
    g.add_argument("--order", choices=("degrevlex", "lex"), default="degrevlex")
    g.set_defaults(func=cmd_gb)

    r = sub.add_parser("relations", parents=[common], help="print the 19 relations")
    r.add_argument("--symbolic", action="store_true", help="keep u symbolic")
    r.set_defaults(func=cmd_relations)

    m = sub.add_parser("map", parents=[common], help="print the images of a word", epilog=WORD_HELP)
    m.add_argument("--word", required=True)
    m.set_defaults(func=cmd_map)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        return args.func(args)
    except (InputError, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except LimitExceeded as exc:
        print(f"resource limit exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except MemoryError:
        print("resource limit exceeded: out of memory", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
