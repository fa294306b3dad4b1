"""Acceptance criteria 1-9.

Each criterion is a function returning (ok, detail); the pytest wrappers
assert on it and record a one-line verdict that is printed at the end of
the session.  Run this file directly to print the lines without pytest.
"""

from __future__ import annotations

import copy
import json
import time
from fractions import Fraction

from g2daha.cli import main as cli_main
from g2daha.daha import T1, ParameterSpec, evaluate_relations, relation_set, uniform_point
from g2daha.fixlocus import (
    FAIL,
    PASS,
    VerifyOptions,
    constraint_generators,
    fiber_parameter,
    load_registry,
    verify_component,
)
from g2daha.groebner import GBLimits, buchberger, ideal_member
from g2daha.mcg import (
    HYPERELLIPTIC,
    compose_word,
    jacobian_rank,
    preserves_variety,
    sample_variety_point,
    twist_map,
    verify_on_samples,
)
from g2daha.poly import substitute

TDEF_U0 = Fraction(3, 2)
NUMERIC_TOL = 1e-8
SEED = 42
GB_BUDGET = GBLimits(max_pairs=100_000, timeout=600)

RESULTS: dict[int, str] = {}


def _record(n: int, ok: bool, detail: str, elapsed: float) -> None:
    RESULTS[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({elapsed:.1f}s) {detail}"


def _timed(n: int, fn, limit: float):
    start = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - start
    if elapsed > limit:
        ok, detail = False, f"{detail}; runtime {elapsed:.1f}s exceeds {limit:.0f}s"
    _record(n, ok, detail, elapsed)
    return ok, detail


def criterion_1():
    rels = relation_set(T1)
    bad_pt = [lab for lab, v in zip(rels.labels, evaluate_relations(uniform_point(2, 2, 2))) if not v.is_zero()]
    rot = twist_map("I")
    bad_cov = []
    for fam in range(3):
        block = rels.relations[6 * fam:6 * fam + 6]
        for i in range(6):
            if substitute(block[i], rot) != block[(i + 1) % 6]:
                bad_cov.append(rels.labels[6 * fam + i])
    casimir_ok = substitute(rels.relations[-1], rot) == rels.relations[-1]
    ok = not bad_pt and not bad_cov and casimir_ok
    return ok, (f"all-2 nonzero: {bad_pt or 'none'}; covariance failures: {bad_cov or 'none'}; "
                f"Casimir invariant: {casimir_ok}")


def criterion_2():
    bad = []
    for k in range(1, 6):
        for w in ([f"d{k}", f"d{k}i"], [f"d{k}i", f"d{k}"]):
            if not compose_word(w).is_identity():
                bad.append(",".join(w))
    rot = twist_map("I")
    perm = all(len(img.terms) == 1 and img.total_degree() == 1 and img.terms[0][1] == 1 for img in rot.images)
    perm = perm and len({img for img in rot.images}) == 15
    powers = [compose_word(["I"] * k).is_identity() for k in range(1, 7)]
    order6 = powers == [False] * 5 + [True]
    return not bad and perm and order6, (f"non-identity compositions: {bad or 'none'}; "
                                         f"I is a permutation: {perm}; I has order 6: {order6}")


def criterion_3():
    words = [(f"d{k},d{k + 1},d{k}", f"d{k + 1},d{k},d{k + 1}") for k in range(1, 5)]
    words += [("d1,d3", "d3,d1"), ("d1,d4", "d4,d1"), ("d2,d4", "d4,d2"), (str(HYPERELLIPTIC), "id")]
    bad, worst = [], 0.0
    for lhs, rhs in words:
        rep = verify_on_samples(lhs, rhs, n=5, p=T1, seed=SEED, tol=NUMERIC_TOL)
        worst = max(worst, max(rep.differences))
        if rep.verdict != "PASS" or len(rep.seeds) < 5:
            bad.append(f"{lhs} = {rhs}")
    points = [sample_variety_point(T1, SEED + k) for k in range(5)]
    image_res = {z: max(preserves_variety(z, points, T1)) for z in ("z2", "z3", "z4")}
    bad += [f"{z} residual {r:.2e}" for z, r in image_res.items() if not r <= NUMERIC_TOL]
    return not bad, (f"{len(words)} word relations on 5 points, max |lhs-rhs| {worst:.1e}; "
                     f"zeta image residuals {', '.join(f'{z} {r:.1e}' for z, r in image_res.items())}; "
                     f"failures: {bad or 'none'}")


def criterion_4():
    reg = load_registry()
    points = [c for c in reg.components if c.kind == "point"]
    bad = []
    for c in points:
        p = ParameterSpec(Fraction(1) if c.fiber == "t1" else TDEF_U0)
        vals = evaluate_relations(c.point_at(p.u0), p)
        n_bad = sum(not v.is_zero() for v in vals)
        if n_bad:
            bad.append(f"{c.subgroup} {c.name} ({n_bad}/19 nonzero)")
    return not bad, f"{len(points) - len(bad)}/{len(points)} point components vanish exactly; failing: {bad or 'none'}"


CRITERION_5 = [
    ("G_b", "t1", "I_b", 4), ("G_b", "tdef", "I_b^(t)", 4),
    ("G_c", "t1", "I_1", 2), ("G_c", "tdef", "I_1^(t)", 2),
    ("G_e", "t1", "I_1", 2), ("G_e", "t1", "I_2", 2),
    ("G_e", "tdef", "I_1^(t)", 2), ("G_e", "tdef", "I_2^(t)", 2),
    ("G_k1", "t1", "I_1", 2), ("G_k1", "tdef", "I_1^(t)", 2),
    ("G_k2", "t1", "I_1", 2), ("G_k2", "tdef", "I_1^(t)", 2),
    ("G_n", "t1", "I_1", 2), ("G_n", "tdef", "I_1^(t)", 2),
    ("G_h", "tdef", "I_1^(t)", 0),
]


def criterion_5():
    reg = load_registry()
    by_key = {c.key: c for c in reg.components}
    opts = VerifyOptions(gb_limits=GB_BUDGET, relation_dimension=False)
    bad, good = [], 0
    for sg, fib, name, dim in CRITERION_5:
        c = by_key[(sg, fib, name)]
        assert c.dim == dim
        rep = verify_component(c, reg, fiber_parameter(fib, TDEF_U0), opts)
        van, dimv = rep.checks["VANISHING"].verdict, rep.checks["DIMENSION"].verdict
        if van == PASS and dimv == PASS:
            good += 1
        else:
            rel = rep.info.get("relations_in_ideal", "?")
            bad.append(f"{sg} {name}: VANISHING {van} ({rel}/19), DIMENSION {dimv} "
                       f"(computed {rep.computed_dim}, claimed {dim})")
    return not bad, f"{good}/{len(CRITERION_5)} match; failing: {bad or 'none'}"


def criterion_6():
    reg = load_registry()
    words = {"G_b": ["I"] * 3, "G_c": ["I"] * 2, "G_i": ["I"]}
    bad, checked = [], 0
    for sg, w in words.items():
        assert [list(x.atoms) for x in reg.subgroup(sg).action_words] == [w]
        lin = constraint_generators([w])
        for c in reg.components_of(sg):
            p = fiber_parameter(c.fiber, TDEF_U0)
            checked += 1
            if c.kind == "point":
                pt = c.point_at(p.u0)
                if any(not g.evaluate(pt).is_zero() for g in lin):
                    bad.append(f"{sg} {c.name}")
            else:
                gb = buchberger(c.generators_at(p.u0), limits=GB_BUDGET)
                if not all(ideal_member(g, gb) for g in lin):
                    bad.append(f"{sg} {c.name}")
    return not bad, f"{checked - len(bad)}/{checked} components contain their rotation constraints; failing: {bad or 'none'}"


def criterion_7():
    zero = constraint_generators([["z0"]]) == []
    ranks = {}
    for fiber in ("t1", "tdef"):
        p = fiber_parameter(fiber, TDEF_U0)
        ranks[fiber] = [jacobian_rank(sample_variety_point(p, SEED + k), p, 1e-8) for k in range(3)]
    ok = zero and all(r == [9, 9, 9] for r in ranks.values())
    return ok, f"zeta0 constraint part zero: {zero}; Jacobian ranks {ranks} (local dimension 15 - 9 = 6)"


def criterion_8(tmp_dir):
    all3 = evaluate_relations(uniform_point(3, 3, 3))
    control_fails = any(not v.is_zero() for v in all3)
    reg = load_registry()
    doc = json.loads(open(reg.source, encoding="utf-8").read())
    corrupted = copy.deepcopy(doc)
    entry = next(c for c in corrupted["components"] if c["subgroup"] == "G_h" and c["name"] == "I_3")
    name, value = next((k, v) for k, v in entry["point"].items() if v.strip() != "0")
    entry["point"][name] = f"-({value})"
    path = tmp_dir / "corrupted.json"
    path.write_text(json.dumps(corrupted), encoding="utf-8")
    bad_reg = load_registry(path)
    comp = next(c for c in bad_reg.components if c.subgroup == "G_h" and c.name == "I_3")
    verdict = verify_component(comp, bad_reg, T1).checks["VANISHING"].verdict
    original = next(c for c in reg.components if c.subgroup == "G_h" and c.name == "I_3")
    baseline = verify_component(original, reg, T1).checks["VANISHING"].verdict
    ok = control_fails and verdict == FAIL and baseline == PASS
    return ok, (f"all-3 point rejected: {control_fails}; G_h I_3 with {name} negated: VANISHING {verdict} "
                f"(unmodified: {baseline})")


def criterion_9(tmp_dir):
    outs = []
    codes = []
    for k in range(2):
        out = tmp_dir / f"report{k}.md"
        codes.append(cli_main(["verify-all", "--out", str(out)]))
        outs.append(out.read_bytes())
    ok = outs[0] == outs[1] and codes[0] == codes[1]
    return ok, f"two verify-all runs: byte-identical {outs[0] == outs[1]}, exit codes {codes}, {len(outs[0])} bytes"


# pytest wrappers


def test_criterion_1_relation_sanity():
    ok, detail = _timed(1, criterion_1, 1.0)
    assert ok, detail


def test_criterion_2_exact_group_algebra():
    ok, detail = _timed(2, criterion_2, 5.0)
    assert ok, detail


def test_criterion_3_numeric_group_relations():
    ok, detail = _timed(3, criterion_3, 120.0)
    assert ok, detail


def test_criterion_4_point_components():
    ok, detail = _timed(4, criterion_4, 60.0)
    assert ok, detail


def test_criterion_5_positive_dimensional_components():
    ok, detail = _timed(5, criterion_5, 15 * 600.0)
    assert ok, detail


def test_criterion_6_rotation_containment():
    ok, detail = _timed(6, criterion_6, 120.0)
    assert ok, detail


def test_criterion_7_whole_variety():
    ok, detail = _timed(7, criterion_7, 60.0)
    assert ok, detail


def test_criterion_8_negative_controls(tmp_path):
    ok, detail = _timed(8, lambda: criterion_8(tmp_path), 10.0)
    assert ok, detail


def test_criterion_9_determinism(tmp_path, capsys):
    ok, detail = _timed(9, lambda: criterion_9(tmp_path), 600.0)
    capsys.readouterr()
    assert ok, detail


if __name__ == "__main__":
    import sys
    import tempfile
    from pathlib import Path

    with tempfile.TemporaryDirectory() as d:
        tmp = Path(d)
        plan = [(1, criterion_1, 1), (2, criterion_2, 5), (3, criterion_3, 120), (4, criterion_4, 60),
                (5, criterion_5, 9000), (6, criterion_6, 120), (7, criterion_7, 60),
                (8, lambda: criterion_8(tmp), 10), (9, lambda: criterion_9(tmp), 600)]
        for n, fn, limit in plan:
            _timed(n, fn, limit)
            print(RESULTS[n], flush=True)
    sys.exit(0 if all(": PASS" in line for line in RESULTS.values()) else 1)
