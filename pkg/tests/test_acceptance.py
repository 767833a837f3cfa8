"""End-to-end acceptance checks, one group per criterion.

A summary with one PASS/FAIL line per criterion is printed at the end of
the pytest run (see conftest.py).
"""

import json
import random
import time
from fractions import Fraction

import flint
import mpmath
import pytest
import sympy

from anosov_units import cli
from anosov_units.lemmas import RuleId, lemma6_check, sample_unit_pairs, verify_all
from anosov_units.liealg import (
    LinearMap,
    build_type94,
    check_anosov_matrix,
    eigen_compat,
    has_abelian_factor,
    type_of,
)
from anosov_units.obstruction import (
    Infeasible,
    TypeSignature,
    reduce_by_abelian_factor,
    replay_steps,
    replay_trace,
    screen_type,
    split_type_n2,
    sweep,
)
from anosov_units.polyint import (
    IntPoly,
    factor_int_poly,
    is_root_of_unity_poly,
    parse_poly,
    poly_arith,
    product_poly,
)
from anosov_units.roots import is_hyperbolic
from anosov_units.units import conjugates, inverse_unit, make_unit

from _oracles import X, match_multisets, random_palindromic, random_unit_poly, roots_with_multiplicity

P = parse_poly


def cli_json(capsys, *argv):
    code = cli.main([*argv, "--json"])
    return code, json.loads(capsys.readouterr().out)


def rules_by_type(report):
    out = {}
    for step in report["traces"]:
        out.setdefault(tuple(step["data"]["type"]), []).append(step)
    return out


# -- 1 ------------------------------------------------------------------------

def test_criterion_01_dimension_13_sweep(capsys):
    t0 = time.perf_counter()
    code, rep = cli_json(capsys, "analyze", "--dim", "13", "--steps", "2", "--no-abelian-factor")
    elapsed = time.perf_counter() - t0
    assert code == 0
    assert elapsed < 60
    rows = rep["results"]["types"]
    surv = [r for r in rows if r["verdict"] == "SurvivesScreen"]
    assert [r["type"] for r in surv] == [[9, 4]]
    assert [s["shape"] for s in surv[0]["survivors"]] == [{"f": [3, 6], "g": [2, 2]}]
    assert len(rows) == 7 and sum(r["verdict"] == "Infeasible" for r in rows) == 6

    steps = rules_by_type(rep)
    eleven = [s for s in steps[(11, 2)] if s["data"]["shape"]["f"] == [11]]
    assert eleven and {s["rule"] for s in eleven} == {"Remark2"}
    lemma3 = [s for s in steps[(9, 4)] if s["rule"] == "Lemma3"]
    assert lemma3 and all(s["data"]["shape"]["g"] == [4] for s in lemma3)
    assert any(s["rule"] == "SexticPair" for s in steps[(8, 5)])
    assert any(s["rule"] == "SexticPair" for s in steps[(6, 7)])
    assert any(s["rule"] == "PaperCase10_3" for s in steps[(10, 3)])
    assert any(s["rule"] == "PaperCase7_6i" for s in steps[(7, 6)])
    for s in rep["traces"]:
        assert s["citation"] == RuleId(s["rule"]).citation


# -- 2 ------------------------------------------------------------------------

def test_criterion_02_dimension_7(capsys):
    rows = dict((t.parts, v) for t, v in sweep(7, 2, True))
    assert set(rows) == {(4, 3), (5, 2)}
    assert all(isinstance(v, Infeasible) for v in rows.values())
    assert reduce_by_abelian_factor(7) == [(0, 7)]
    code, rep = cli_json(capsys, "analyze", "--dim", "7", "--steps", "2", "--no-abelian-factor")
    assert code == 0 and rep["results"]["surviving_types"] == []
    assert rep["results"]["conclusion"] == "abelian only"


# -- 3 ------------------------------------------------------------------------

@pytest.mark.parametrize("t", [(5, 3), (3, 3, 2)])
def test_criterion_03_dimension_8(t):
    v = screen_type(TypeSignature(t), True)
    assert isinstance(v, Infeasible)
    assert v.trace.steps
    assert replay_trace(v.trace)
    assert replay_steps(json.loads(v.trace.canonical()))


# -- 4 ------------------------------------------------------------------------

def test_criterion_04_product_poly_oracle():
    rng = random.Random(20240404)
    for _ in range(200):
        f, g = random_unit_poly(rng), random_unit_poly(rng)
        prod = product_poly(f, g)
        numeric = [a * b for a in roots_with_multiplicity(f) for b in roots_with_multiplicity(g)]
        assert match_multisets(numeric, roots_with_multiplicity(prod), 1e-8), (f, g)


def test_criterion_04_factor_remultiplies():
    rng = random.Random(4040)
    for _ in range(200):
        f, g = random_unit_poly(rng), random_unit_poly(rng)
        for h in (f, product_poly(f, g)):
            acc = IntPoly((1,))
            for q, e in factor_int_poly(h):
                for _ in range(e):
                    acc = poly_arith(acc, q, "mul")
            assert acc == h


# -- 5 ------------------------------------------------------------------------

def _numeric_gap(f, dps=40):
    with mpmath.workdps(dps):
        return min(abs(abs(r) - 1) for r in mpmath.polyroots(list(reversed(f.coeffs)), maxsteps=400, extraprec=200))


def test_criterion_05_cyclotomic():
    for n in range(1, 31):
        c = sympy.Poly(sympy.cyclotomic_poly(n, X), X)
        assert is_root_of_unity_poly(IntPoly(tuple(int(v) for v in reversed(c.all_coeffs())))), n


def test_criterion_05_hyperbolic_units_are_not_torsion():
    rng = random.Random(55)
    found = 0
    while found < 100:
        f = random_unit_poly(rng)
        if sympy.sqf_part(sympy.Poly(list(reversed(f.coeffs)), X)).degree() != f.degree:
            continue
        if _numeric_gap(f) < 1e-10:
            continue
        found += 1
        assert not is_root_of_unity_poly(f), f


# -- 6 ------------------------------------------------------------------------

def _certified_hyperbolic(f: IntPoly) -> bool:
    """Ball arithmetic on the squarefree part: True iff no |root| ball contains 1."""
    sq = sympy.sqf_part(sympy.Poly(list(reversed(f.coeffs)), X))
    fp = flint.fmpz_poly([int(c) for c in reversed(sq.all_coeffs())])
    for bits in (128, 512, 2048):
        with flint.ctx.workprec(bits):
            mods = [abs(r) for r, _ in fp.complex_roots()]
            one = flint.arb(1)
            if all(not m.overlaps(one) for m in mods):
                return True
            # a root exactly on the circle keeps its ball around 1 at every precision
    return False


def test_criterion_06_hyperbolicity():
    rng = random.Random(66)
    polys = [random_palindromic(rng) for _ in range(40)]
    while len(polys) < 200:
        polys.append(random_unit_poly(rng, bound=5))
    reciprocal = sum(1 for p in polys if p.coeffs == p.coeffs[::-1])
    assert reciprocal >= 20
    disagreements = [p for p in polys if is_hyperbolic(p) != _certified_hyperbolic(p)]
    assert disagreements == []
    assert not is_hyperbolic(poly_arith(P("x^2-3x+1"), P("x^2+x+1"), "mul"))


# -- 7 ------------------------------------------------------------------------

LEMMA_RULES = [RuleId.Lemma1, RuleId.Corollary1, RuleId.Corollary2, RuleId.Corollary3,
               RuleId.Remark2, RuleId.Lemma2, RuleId.Lemma3]


@pytest.mark.slow
def test_criterion_07_lemma_suite():
    pairs = sample_unit_pairs(1000, seed=7)
    counts = {r: {"pass": 0, "vacuous": 0, "counterexample": 0} for r in LEMMA_RULES}
    for a, b in pairs:
        for rule, res in verify_all(a, b, LEMMA_RULES).items():
            counts[rule][res.verdict] += 1
    for rule in LEMMA_RULES:
        assert counts[rule]["counterexample"] == 0, rule
    # the sample must actually exercise the hypotheses that can hold
    for rule in (RuleId.Lemma1, RuleId.Corollary1, RuleId.Corollary2, RuleId.Lemma2):
        assert counts[rule]["pass"] > 0, rule


def test_criterion_07_lemma6():
    betas = conjugates(make_unit(P("x^3-3x+1")))
    lam = make_unit(P("x^2-3x+1"), 1)
    assert lemma6_check(betas, lam, lam)
    assert lemma6_check(betas, lam, inverse_unit(lam))
    assert lemma6_check(betas, inverse_unit(lam), lam)
    independent = make_unit(P("x^2-x-1"), 1)
    assert lemma6_check(betas, independent, lam) is False
    assert lemma6_check(betas, lam, make_unit(P("x^2-4x+1"), 1)) is False


# -- 8 ------------------------------------------------------------------------

def test_criterion_08_family_defaults():
    L, E = build_type94(1, 1, 1, 1, cubic=P("x^3-3x+1"), quadratic=P("x^2-3x+1"))
    assert type_of(L) == TypeSignature((9, 4))
    assert has_abelian_factor(L) is None
    assert eigen_compat(L, E)
    assert all(isinstance(c, Fraction) for *_, c in L.nonzero_constants())


def test_criterion_08_b_d_zero_flips_abelian_factor():
    L, _ = build_type94(1, 0, 1, 0)
    assert all(isinstance(c, Fraction) for *_, c in L.nonzero_constants())
    assert has_abelian_factor(L) is not None


# -- 9 ------------------------------------------------------------------------

def test_criterion_09_anosov_matrices():
    assert check_anosov_matrix(LinearMap(((2, 1), (1, 1))))
    assert not check_anosov_matrix(LinearMap.identity(2))
    assert not check_anosov_matrix(LinearMap.identity(3))
    assert not check_anosov_matrix(LinearMap(((1, 1), (0, 1))))


# -- 10 -----------------------------------------------------------------------

def test_criterion_10_split():
    facs = [P("x^2-3x+1"), P("x^3-3x+1")]
    g = P("x^2-3x+1")
    r = split_type_n2(facs, g, 8)
    assert r.v1 and r.v2
    assert sorted(r.v1 + r.v2) == list(range(5))
    assert {tuple(c["pair"]) for c in r.certificate} == {(i, j) for i in r.v1 for j in r.v2}
    z = [make_unit(facs[f], k).as_complex() for f, k in r.roots]
    mu = r.mu.as_complex()
    for i in r.v1:
        for j in r.v2:
            w = z[i] * z[j]
            assert min(abs(w - mu), abs(w - 1 / mu)) > 1e-6


def test_criterion_10_trace_replay(capsys):
    verdicts = [v for _, v in sweep(13, 2, True)] + [v for _, v in sweep(7, 2, True)]
    verdicts += [v for _, v in sweep(8, 3, True)] + [screen_type(TypeSignature((5, 3)))]
    for v in verdicts:
        assert replay_trace(v.trace)
        data = json.loads(v.trace.canonical())
        assert replay_steps(data)
    _, rep = cli_json(capsys, "analyze", "--dim", "13", "--no-abelian-factor")
    assert replay_steps(rep["traces"])
