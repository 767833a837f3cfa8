import warnings

import mpmath
import pytest
import sympy
from hypothesis import assume, given, settings, strategies as st

from anosov_units.lemmas import unit_pool
from anosov_units.polyint import parse_poly
from anosov_units.roots import is_hyperbolic
from anosov_units.units import (
    CertificationWarning,
    UnitWord,
    compositum_degree,
    conjugates,
    degree,
    evaluate_word,
    find_power_relation,
    inverse_unit,
    is_pm_power_one,
    is_root_of_unity,
    make_unit,
    power_unit,
    product_unit,
    rational_unit,
    relative_degree,
    word_to_unit,
    words_equal,
)

from _oracles import X

P = parse_poly


@pytest.fixture
def phi():
    return make_unit(P("x^2-x-1"), 1.618)


@pytest.fixture
def phi_bar():
    return make_unit(P("x^2-x-1"), -0.618)


def test_make_unit(phi):
    assert phi.minpoly == P("x^2-x-1")
    assert abs(phi.as_complex() - 1.6180339887) < 1e-9
    with pytest.raises(ValueError, match="unit"):
        make_unit(P("x^2-2"))
    with pytest.raises(ValueError, match="reducible"):
        make_unit(P("x^2-1"))
    with pytest.raises(IndexError):
        make_unit(P("x^2-x-1"), 2)


def test_make_unit_by_box(phi):
    box = phi.root
    assert make_unit(P("x^2-x-1"), box) == phi


def test_inverse(phi):
    inv = inverse_unit(phi)
    assert inv.minpoly == P("x^2+x-1")
    assert abs(inv.as_complex() - 0.6180339887) < 1e-9
    m1 = rational_unit(-1)
    assert inverse_unit(m1) == m1


def test_products(phi, phi_bar):
    sq = product_unit(phi, phi)
    assert sq.minpoly == P("x^2-3x+1")
    assert abs(sq.as_complex() - 2.618034) < 1e-6
    assert product_unit(phi, phi_bar) == rational_unit(-1)
    assert product_unit(phi, inverse_unit(phi)).minpoly == P("x-1")


def test_product_matches_sympy_minpoly(phi):
    c = make_unit(P("x^3-3x+1"), 2)
    w = product_unit(phi, c)
    r_phi = (1 + sympy.sqrt(5)) / 2
    cub = sympy.CRootOf(X**3 - 3 * X + 1, 2)
    mp = sympy.minimal_polynomial(r_phi * cub, X)
    assert sympy.Poly(mp, X).all_coeffs() == list(reversed(w.minpoly.coeffs))
    assert abs(w.as_complex() - complex(sympy.N(r_phi * cub, 20))) < 1e-12


def test_degree(phi):
    assert degree(phi) == 2
    assert degree(make_unit(P("x^3-3x+1"))) == 3
    assert degree(rational_unit(-1)) == 1


def test_compositum(phi, phi_bar):
    assert compositum_degree(phi, phi_bar) == 2
    a = make_unit(P("x^2-3x+1"))
    b = make_unit(P("x^3-3x+1"))
    assert compositum_degree(a, b) == 6
    assert compositum_degree(b, b) == 3
    # cubic with Galois group S3: two roots generate the splitting field of degree 6
    s3 = P("x^3-x-1")
    r = conjugates(make_unit(s3))
    assert compositum_degree(r[0], r[1]) == 6
    # cyclic cubic: every root lies in the same field
    c = conjugates(b)
    assert compositum_degree(c[0], c[1]) == 3


def test_relative_degree(phi, phi_bar):
    assert relative_degree(phi_bar, phi) == 1
    assert relative_degree(make_unit(P("x^3-3x+1")), make_unit(P("x^2-3x+1"))) == 3
    c = make_unit(P("x^3-3x+1"))
    assert relative_degree(c, rational_unit(-1)) == 3


def test_pm_power_one(phi):
    assert is_pm_power_one(rational_unit(-1), 1)
    assert not is_pm_power_one(phi, 2)
    assert is_pm_power_one(make_unit(P("x^2+1")), 2)
    assert not is_pm_power_one(make_unit(P("x^2+1")), 1)


def test_root_of_unity(phi):
    assert is_root_of_unity(rational_unit(-1))
    assert not is_root_of_unity(phi)
    assert is_root_of_unity(make_unit(P("x^2+x+1")))


def test_power_unit(phi):
    assert power_unit(phi, 0) == rational_unit(1)
    assert power_unit(phi, 2) == product_unit(phi, phi)
    assert power_unit(phi, -1) == inverse_unit(phi)
    cube = power_unit(phi, 3)
    with mpmath.workdps(30):
        assert abs(cube.as_complex() - float(mpmath.phi ** 3)) < 1e-12


def test_find_power_relation():
    mu = make_unit(P("x^2-3x+1"), 1)
    alpha = make_unit(P("x^3-3x+1"), 0)
    g1 = product_unit(power_unit(mu, 2), alpha)
    assert find_power_relation(g1, alpha, mu) == (2, 1)
    g2 = product_unit(mu, inverse_unit(alpha))
    assert find_power_relation(g2, alpha, mu) == (1, -1)
    other = conjugates(alpha)[1]
    assert find_power_relation(other, alpha, mu) is None


def test_word_algebra():
    w = UnitWord.of("lam", ("a", -1))
    assert w * w.inverse() == UnitWord.of()
    assert (w ** 2) == UnitWord.of(("lam", 2), ("a", -2))
    assert UnitWord.parse(str(w)) == w
    assert w.names() == {"lam", "a"}


def test_words_equal():
    lam = make_unit(P("x^2-3x+1"), 1)
    a = make_unit(P("x^3-3x+1"), 0)
    reg = {"lam": lam, "a1": a}
    lhs = UnitWord.of("a1") * UnitWord.of("lam", ("a1", -1))
    assert words_equal(lhs, UnitWord.of("lam"), reg)
    assert not words_equal(UnitWord.of(("lam", 2)), UnitWord.of("lam"), reg)
    assert word_to_unit(UnitWord.of(("lam", 2)), reg) == power_unit(lam, 2)
    z = evaluate_word(UnitWord.of("lam", "a1"), reg)
    assert z.overlaps(product_unit(lam, a).ball(64))


def test_words_equal_warns_on_hidden_identity():
    # one number registered under two names: formally distinct, numerically equal
    phi = make_unit(P("x^2-x-1"), 1.618)
    reg = {"p": phi, "q": phi}
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        assert words_equal(UnitWord.of("p"), UnitWord.of("q"), reg)
    assert any(issubclass(r.category, CertificationWarning) for r in rec)


# -- properties ---------------------------------------------------------------

POOL = [p for p in unit_pool() if p.degree <= 4]
units = st.builds(lambda p, i: make_unit(p, i % p.degree),
                  st.sampled_from(POOL), st.integers(0, 11))


@settings(max_examples=40, deadline=None)
@given(units, units)
def test_tower_law(u, v):
    D = compositum_degree(u, v)
    assert D == relative_degree(v, u) * degree(u) == relative_degree(u, v) * degree(v)
    assert D == compositum_degree(v, u)
    assert D % degree(product_unit(u, v)) == 0


@settings(max_examples=40, deadline=None)
@given(units)
def test_inverse_product_is_one(u):
    assert product_unit(u, inverse_unit(u)).minpoly == P("x-1")


@settings(max_examples=40, deadline=None)
@given(units)
def test_hyperbolic_is_not_torsion(u):
    assume(is_hyperbolic(u.minpoly))
    assert not is_root_of_unity(u)


@settings(max_examples=30, deadline=None)
@given(units, units)
def test_product_value(u, v):
    w = product_unit(u, v)
    assert abs(w.as_complex() - u.as_complex() * v.as_complex()) < 1e-9
