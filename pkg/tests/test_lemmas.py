import pytest
from hypothesis import given, settings, strategies as st

from anosov_units.errors import LemmaViolation
from anosov_units.lemmas import (
    LEMMA_NAMES,
    RULE_PRIORITY,
    DegreeTriple,
    RuleId,
    lemma6_check,
    orientations,
    refire,
    same_factor_pair_forbidden,
    sample_unit_pairs,
    triple_firing,
    triple_forbidden,
    unit_pool,
    verify_all,
    verify_implication,
)
from anosov_units.polyint import parse_poly
from anosov_units.units import (
    conjugates,
    degree,
    inverse_unit,
    is_root_of_unity,
    make_unit,
    product_unit,
    rational_unit,
)

P = parse_poly
T = DegreeTriple


@pytest.mark.parametrize("t, rule", [
    ((11, 11, 2), RuleId.Remark2),
    ((2, 3, 2), RuleId.Lemma2),
    ((3, 6, 2), None),
    ((3, 6, 4), RuleId.Lemma3),
])
def test_triple_examples(t, rule):
    assert triple_forbidden(T(*t)) == rule


def test_lemma3_orientation_is_recorded():
    f = triple_firing(T(3, 6, 4))
    assert f.rule == RuleId.Lemma3 and f.orientation == (4, 6, 3)
    assert refire(f.rule, f.orientation)


def test_degree_arithmetic():
    # lcm(2, 2, 6) = 6 exceeds 2*2, and no named rule fires first
    assert triple_forbidden(T(2, 2, 6)) == RuleId.DegreeArithmetic
    assert triple_forbidden(T(4, 6, 5)) is not None
    assert triple_forbidden(T(3, 3, 3)) is None


@pytest.mark.parametrize("k, l, rule", [
    (6, 2, RuleId.SexticPair),
    (6, 4, RuleId.SexticPair),
    (3, 3, None),
    (6, 3, None),
    (3, 4, RuleId.Remark2),
])
def test_same_factor(k, l, rule):
    assert same_factor_pair_forbidden(k, l) == rule


def test_same_factor_rejects_linear():
    with pytest.raises(ValueError):
        same_factor_pair_forbidden(1, 1)


def test_sextic_conjugates_with_cubic_product_exist():
    # eps * phi and eps * phi' are conjugate sextic units with cubic product -eps^2,
    # so no rule may forbid (6, 6, 3) for a single factor
    eps = make_unit(P("x^3-3x+1"), 0)
    phi, phi_bar = conjugates(make_unit(P("x^2-x-1")))
    a, b = product_unit(eps, phi), product_unit(eps, phi_bar)
    assert a.minpoly == b.minpoly and a != b and a.degree == 6
    ab = product_unit(a, b)
    assert ab.degree == 3
    assert same_factor_pair_forbidden(6, ab.degree) is None


def test_degree_triple_validation():
    with pytest.raises(ValueError):
        T(0, 1, 1)
    assert not T(2, 2, 5).valid
    assert T(2, 3, 6).valid


def test_priority_order_is_total():
    assert len(RULE_PRIORITY) == len(set(RULE_PRIORITY))
    assert RULE_PRIORITY[-2:] == [RuleId.SexticPair, RuleId.DegreeArithmetic]


def test_citations_present():
    for r in RuleId:
        assert r.citation and str(r) == r.value


def test_verify_examples():
    m1 = rational_unit(-1)
    phi = make_unit(P("x^2-x-1"), 1)
    cubic = make_unit(P("x^3-3x+1"))
    assert verify_implication(RuleId.Lemma1, m1, phi).verdict == "pass"
    assert verify_implication(RuleId.Lemma2, phi, cubic).verdict == "pass"
    assert verify_implication(RuleId.Corollary2, phi, phi).verdict == "vacuous"
    with pytest.raises(ValueError):
        verify_implication(RuleId.SexticPair, phi, phi)


def test_verify_all_agrees_with_single():
    for a, b in sample_unit_pairs(30, seed=5):
        res = verify_all(a, b)
        for rule, r in res.items():
            assert verify_implication(rule, a, b) == r


def test_lemma_names_cover_lemma6():
    assert LEMMA_NAMES["lemma6"] == RuleId.Lemma6
    assert "remark2" in LEMMA_NAMES


def test_lemma6_examples():
    betas = conjugates(make_unit(P("x^3-3x+1")))
    lam = make_unit(P("x^2-3x+1"), 1)
    assert lemma6_check(betas, lam, lam)
    assert lemma6_check(betas, lam, inverse_unit(lam))
    phi = make_unit(P("x^2-x-1"), 1)
    assert not lemma6_check(betas, phi, lam)


def test_lemma6_preconditions():
    lam = make_unit(P("x^2-3x+1"), 1)
    with pytest.raises(ValueError):
        lemma6_check([lam, lam], lam, lam)


def test_lemma6_violation_type():
    assert issubclass(LemmaViolation, RuntimeError)


def test_pool_is_irreducible_units():
    pool = unit_pool()
    assert len(pool) == len(set(pool))
    assert max(p.degree for p in pool) == 6


def test_sampling_is_seeded():
    assert sample_unit_pairs(20, 3) == sample_unit_pairs(20, 3)
    assert sample_unit_pairs(20, 3) != sample_unit_pairs(20, 4)


# -- properties ---------------------------------------------------------------

small = st.integers(1, 12)


@settings(max_examples=300, deadline=None)
@given(small, small, small)
def test_orientation_closure(m, n, l):
    t = T(m, n, l)
    base = triple_forbidden(t) is not None
    for o in orientations(t):
        assert (triple_forbidden(T(*o)) is not None) == base


def test_soundness_on_samples():
    # the rules forbid triples for non-torsion units only
    bad, seen = [], 0
    for a, b in sample_unit_pairs(400, seed=17):
        ab = product_unit(a, b)
        if any(is_root_of_unity(u) for u in (a, b, ab)):
            continue
        seen += 1
        same = a.minpoly == b.minpoly and a != b
        t = T(degree(a), degree(b), degree(ab))
        if same and triple_forbidden(t, same_factor=True) is not None:
            bad.append((a, b))
        if not same and triple_forbidden(t) is not None:
            bad.append((a, b))
    assert seen > 150 and bad == []


def test_lemma6_true_means_same_minpoly():
    betas = conjugates(make_unit(P("x^3-3x+1")))
    quads = [p for p in unit_pool() if p.degree == 2]
    lam = make_unit(P("x^2-3x+1"), 1)
    for q in quads:
        for mu in conjugates(make_unit(q)):
            if not mu.is_real:
                continue
            if lemma6_check(betas, lam, mu):
                assert mu.minpoly in (lam.minpoly, inverse_unit(lam).minpoly)
