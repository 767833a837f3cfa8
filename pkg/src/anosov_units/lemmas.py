"""Degree rules for products of algebraic units.

Two layers live here.  The symbolic layer decides, from the degrees
``(deg a, deg b, deg ab)`` alone, whether a triple can be realised by units
none of which is a root of unity.  The concrete layer evaluates the same
statements on actual units so the symbolic rules can be property-tested.
"""

from __future__ import annotations

import enum
import random
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, lcm
from typing import Callable, Iterable, Optional, Sequence

from .errors import LemmaViolation
from .polyint import IntPoly, parse_poly
from .units import (
    AlgebraicUnit,
    compositum_degree,
    conjugates,
    inverse_unit,
    is_pm_power_one,
    make_unit,
    product_unit,
)

__all__ = [
    "DegreeTriple",
    "RuleId",
    "Firing",
    "CheckResult",
    "orientations",
    "triple_forbidden",
    "triple_firing",
    "same_factor_pair_forbidden",
    "refire",
    "verify_implication",
    "verify_all",
    "lemma6_check",
    "all_conjugate_pairs",
    "LEMMA_NAMES",
    "unit_pool",
    "sample_unit_pairs",
]


class RuleId(str, enum.Enum):
    """Named results; ``.citation`` states what the rule asserts."""

    Lemma1 = "Lemma1"
    Corollary1 = "Corollary1"
    Remark2 = "Remark2"
    Corollary2 = "Corollary2"
    Corollary3 = "Corollary3"
    Lemma2 = "Lemma2"
    Lemma3 = "Lemma3"
    Lemma4 = "Lemma4"
    Lemma5 = "Lemma5"
    Lemma6 = "Lemma6"
    SexticPair = "SexticPair"
    DegreeArithmetic = "DegreeArithmetic"
    QuadraticCollision = "QuadraticCollision"
    PaperCase10_3 = "PaperCase10_3"
    PaperCase7_6i = "PaperCase7_6i"

    @property
    def citation(self) -> str:
        return _CITATIONS[self]

    def __str__(self):
        return self.value


_CITATIONS = {
    RuleId.Lemma1: "Lemma 1: deg b = deg ab = deg_Q(a) b implies a^(deg b) = ±1",
    RuleId.Corollary1: "Corollary 1: deg a = deg b = deg_Q(ab) a = m implies (ab)^m = ±1",
    RuleId.Remark2: "Remark 2: deg a = deg b coprime to deg ab implies (ab)^(deg b) = ±1",
    RuleId.Corollary2: "Corollary 2: deg a coprime to deg b and deg ab = p prime implies a^p = ±1 or b^p = ±1",
    RuleId.Corollary3: "Corollary 3: deg a coprime to deg b and deg ab = deg b implies a^(deg b) = ±1",
    RuleId.Lemma2: "Lemma 2: deg a < deg b implies deg ab is not coprime to deg b",
    RuleId.Lemma3: "Lemma 3: degrees (4, 6, 3) for (a, b, ab) imply (ab)^3 = ±1",
    RuleId.Lemma4: "Lemma 4: a of degree 6, b conjugate to a, deg_Q(ab) a = 3 implies (ab)^3 = ±1",
    RuleId.Lemma5: "Lemma 5: a generator eigenvalue pairing into no bracket eigenvalue yields an abelian factor",
    RuleId.Lemma6: "Lemma 6: {mu b_i, mu^-1 b_i} = {lam b_i, lam^-1 b_i} for a cubic family forces mu = lam or mu = lam^-1",
    RuleId.SexticPair: "Lemma 4 with Corollary 1 or Lemma 1: distinct conjugates of a sextic unit have product of degree neither 2 nor 4",
    RuleId.DegreeArithmetic: "tower law: [Q(a,b):Q] is a common multiple of deg a, deg b, deg ab and at most the product of any two of them",
    RuleId.QuadraticCollision: "two quadratic generator factors feed one conjugate family into the same bracket layer",
    RuleId.PaperCase10_3: "Case (10,3): with f = {2,2,6}, g = {3} the quadratics coincide up to inversion and X1 - cY1 is central",
    RuleId.PaperCase7_6i: "Case (7,6)(i): with f = {2,2,3}, g = {6} the quadratics coincide up to inversion and X1 - aY1 is central",
}


@dataclass(frozen=True)
class DegreeTriple:
    """Degrees of ``a``, ``b`` and ``ab``."""

    m: int
    n: int
    l: int

    def __post_init__(self):
        for v in (self.m, self.n, self.l):
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ValueError(f"degree triple entries must be positive integers, got {self.as_tuple()}")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.m, self.n, self.l)

    @property
    def valid(self) -> bool:
        """Tower-law consistency: ``lcm(m, n) <= l*min(m, n)`` and ``l <= m*n``."""
        m, n, l = self.as_tuple()
        return lcm(m, n) <= l * min(m, n) and l <= m * n


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % q for q in range(2, int(p ** 0.5) + 1))


# Each predicate reads an oriented triple (deg a, deg b, deg ab).
_ORIENTED_RULES: list[tuple[RuleId, Callable[[int, int, int], bool]]] = [
    (RuleId.Remark2, lambda a, b, c: a == b and gcd(a, c) == 1),
    (RuleId.Lemma2, lambda a, b, c: a < b and gcd(c, b) == 1),
    (RuleId.Corollary3, lambda a, b, c: gcd(a, b) == 1 and c == b),
    (RuleId.Corollary2, lambda a, b, c: gcd(a, b) == 1 and _is_prime(c)),
    (RuleId.Lemma3, lambda a, b, c: (a, b, c) == (4, 6, 3)),
]

RULE_PRIORITY = [r for r, _ in _ORIENTED_RULES] + [RuleId.SexticPair, RuleId.DegreeArithmetic]


def _moves(t):
    a, b, c = t
    # ab = c  ==>  ba = c,  c * b^-1 = a,  a^-1 * c = b
    return [(b, a, c), (c, b, a), (a, c, b)]


def orientations(t: DegreeTriple | tuple[int, int, int]) -> list[tuple[int, int, int]]:
    """All degree triples reachable from ``t`` by rearranging the unit triangle."""
    start = t.as_tuple() if isinstance(t, DegreeTriple) else tuple(t)
    seen = [start]
    frontier = [start]
    while frontier:
        nxt = []
        for s in frontier:
            for u in _moves(s):
                if u not in seen:
                    seen.append(u)
                    nxt.append(u)
        frontier = nxt
    return seen


def _sextic_pair(m, n, l, same_factor):
    return same_factor and m == n == 6 and l in (2, 4)


def _degree_arithmetic(m, n, l, same_factor):
    if lcm(m, n, l) > min(m * n, m * l, n * l):
        return True
    # distinct conjugates: each conjugate of ab is a product over an unordered pair
    return same_factor and m == n and l > m * (m - 1) // 2


@dataclass(frozen=True)
class Firing:
    rule: RuleId
    orientation: tuple[int, int, int]


def triple_firing(t: DegreeTriple, same_factor: bool = False) -> Optional[Firing]:
    """First rule forbidding ``t``, with the orientation used.

    Orientations are tried in generation order (``t`` itself first) and the
    rules in priority order within each orientation.  ``same_factor`` means ``a`` and ``b`` are distinct conjugates of one
    irreducible factor.  A forbidden triple cannot be realised by units none
    of which is a root of unity.
    """
    if same_factor and t.m != t.n:
        raise ValueError("same-factor pairs have equal degrees")
    for o in orientations(t):
        for rule, pred in _ORIENTED_RULES:
            if pred(*o):
                return Firing(rule, o)
    if _sextic_pair(*t.as_tuple(), same_factor):
        return Firing(RuleId.SexticPair, t.as_tuple())
    if _degree_arithmetic(*t.as_tuple(), same_factor):
        return Firing(RuleId.DegreeArithmetic, t.as_tuple())
    return None


def triple_forbidden(t: DegreeTriple, same_factor: bool = False) -> Optional[RuleId]:
    f = triple_firing(t, same_factor)
    return f.rule if f else None


def same_factor_pair_forbidden(factor_degree: int, l: int) -> Optional[RuleId]:
    """Rule forbidding ``deg ab = l`` for distinct conjugates of one factor."""
    if factor_degree < 2:
        raise ValueError("factor degree must be at least 2")
    return triple_forbidden(DegreeTriple(factor_degree, factor_degree, l), same_factor=True)


def refire(rule: RuleId, orientation: Sequence[int], same_factor: bool = False) -> bool:
    """Re-evaluate a single recorded firing; used by trace replay."""
    o = tuple(orientation)
    for r, pred in _ORIENTED_RULES:
        if r == rule:
            return pred(*o)
    if rule == RuleId.SexticPair:
        return _sextic_pair(*o, same_factor)
    if rule == RuleId.DegreeArithmetic:
        return _degree_arithmetic(*o, same_factor)
    raise ValueError(f"{rule} is not a degree-triple rule")


# ---------------------------------------------------------------------------
# concrete verification


@dataclass(frozen=True)
class CheckResult:
    hypothesis_holds: bool
    conclusion_holds: bool

    @property
    def verdict(self) -> str:
        if not self.hypothesis_holds:
            return "vacuous"
        return "pass" if self.conclusion_holds else "counterexample"


class _Pair:
    """Lazily computed degree data of a pair (a, b)."""

    def __init__(self, a: AlgebraicUnit, b: AlgebraicUnit):
        self.a, self.b = a, b
        self.m, self.n = a.degree, b.degree
        self._ab = None
        self._D = None

    @property
    def ab(self) -> AlgebraicUnit:
        if self._ab is None:
            self._ab = product_unit(self.a, self.b)
        return self._ab

    @property
    def l(self) -> int:
        return self.ab.degree

    @property
    def D(self) -> int:
        if self._D is None:
            self._D = compositum_degree(self.a, self.b)
        return self._D


def _lemma1(p: _Pair):
    hyp = p.n == p.l == p.D // p.m
    return hyp, lambda: is_pm_power_one(p.a, p.n)


def _corollary1(p: _Pair):
    hyp = p.m == p.n == p.D // p.l
    return hyp, lambda: is_pm_power_one(p.ab, p.m)


def _remark2(p: _Pair):
    hyp = p.m == p.n and gcd(p.m, p.l) == 1
    return hyp, lambda: is_pm_power_one(p.ab, p.n)


def _corollary2(p: _Pair):
    hyp = gcd(p.m, p.n) == 1 and _is_prime(p.l)
    return hyp, lambda: is_pm_power_one(p.a, p.l) or is_pm_power_one(p.b, p.l)


def _corollary3(p: _Pair):
    hyp = gcd(p.m, p.n) == 1 and p.l == p.n
    return hyp, lambda: is_pm_power_one(p.a, p.n)


def _lemma2(p: _Pair):
    return p.m < p.n, lambda: gcd(p.l, p.n) != 1


def _lemma3(p: _Pair):
    return (p.m, p.n, p.l) == (4, 6, 3), lambda: is_pm_power_one(p.ab, 3)


def _lemma4(p: _Pair):
    hyp = p.m == 6 and p.a.minpoly == p.b.minpoly and p.D // p.l == 3
    return hyp, lambda: is_pm_power_one(p.ab, 3)


_VERIFIERS = {
    RuleId.Lemma1: _lemma1,
    RuleId.Corollary1: _corollary1,
    RuleId.Remark2: _remark2,
    RuleId.Corollary2: _corollary2,
    RuleId.Corollary3: _corollary3,
    RuleId.Lemma2: _lemma2,
    RuleId.Lemma3: _lemma3,
    RuleId.Lemma4: _lemma4,
}

LEMMA_NAMES = {r.value.lower(): r for r in _VERIFIERS} | {"lemma6": RuleId.Lemma6}


def verify_implication(rule: RuleId, alpha: AlgebraicUnit, beta: AlgebraicUnit) -> CheckResult:
    """Evaluate hypothesis and conclusion of ``rule`` exactly on ``(alpha, beta)``."""
    try:
        check = _VERIFIERS[RuleId(rule)]
    except KeyError:
        raise ValueError(f"{rule} has no (alpha, beta) form") from None
    hyp, conclusion = check(_Pair(alpha, beta))
    # the conclusion is evaluated either way so vacuous cases still exercise it
    return CheckResult(bool(hyp), bool(conclusion()))


def verify_all(alpha: AlgebraicUnit, beta: AlgebraicUnit,
               rules: Iterable[RuleId] | None = None) -> dict[RuleId, CheckResult]:
    """:func:`verify_implication` for several rules, sharing degree data."""
    pair = _Pair(alpha, beta)
    out = {}
    for rule in (rules if rules is not None else _VERIFIERS):
        hyp, conclusion = _VERIFIERS[RuleId(rule)](pair)
        out[RuleId(rule)] = CheckResult(bool(hyp), bool(conclusion()))
    return out


def _check_lemma6_inputs(betas, lam, mu):
    if len(betas) != 3:
        raise ValueError("need exactly three conjugates")
    p = betas[0].minpoly
    if p.degree != 3 or any(b.minpoly != p for b in betas) or len(set(betas)) != 3:
        raise ValueError("betas must be the three roots of one irreducible cubic")
    for name, u in (("lambda", lam), ("mu", mu)):
        if u.degree != 2 or not u.is_real:
            raise ValueError(f"{name} must be a real quadratic unit")


def lemma6_check(betas: Sequence[AlgebraicUnit], lam: AlgebraicUnit, mu: AlgebraicUnit) -> bool:
    """Compare the families ``{mu b, mu^-1 b}`` and ``{lam b, lam^-1 b}`` exactly.

    Returns False when they differ.  When they agree, ``mu`` must be
    ``lam`` or its inverse; anything else raises LemmaViolation.
    """
    _check_lemma6_inputs(betas, lam, mu)

    def family(u):
        ui = inverse_unit(u)
        return Counter(product_unit(w, b) for w in (u, ui) for b in betas)

    if family(mu) != family(lam):
        return False
    if mu != lam and mu != inverse_unit(lam):
        raise LemmaViolation(f"families agree but {mu} is neither {lam} nor its inverse")
    return True


# ---------------------------------------------------------------------------
# sampling

_BASE_POOL = [
    # torsion, to make the hypotheses of the lemmas actually hold
    "x-1", "x+1", "x^2+1", "x^2+x+1", "x^2-x+1", "x^4+x^3+x^2+x+1", "x^4+1",
    "x^4-x^2+1", "x^4-x^3+x^2-x+1", "x^6+x^5+x^4+x^3+x^2+x+1", "x^6+x^3+1",
    # hyperbolic or Salem units
    "x^2-x-1", "x^2-3x+1", "x^2-4x+1", "x^2-2x-1", "x^2-5x-1",
    "x^3-3x+1", "x^3-x-1", "x^3+x^2-2x-1", "x^3-4x-1", "x^3-3x^2+1",
    "x^4-x-1", "x^4-4x^2+1", "x^4-x^3-x^2-x+1", "x^4-x^3-3x^2+x+1",
    "x^5-x^3-1", "x^5+x^4-4x^3-3x^2+3x+1", "x^6-x-1", "x^6-3x^2+1",
]

# products whose minimal polynomials enrich the pool with related fields
_DERIVED = [
    ("x^3-3x+1", 0, "x^2-x-1", 1),
    ("x^3-3x+1", 2, "x^2-3x+1", 1),
    ("x^2+x+1", 0, "x^2-x-1", 1),
    ("x^2+1", 0, "x^2-x-1", 1),
    ("x^2+1", 0, "x^3-3x+1", 2),
    ("x^2-x-1", 1, "x^2-2x-1", 1),
    ("x^2+x+1", 0, "x^3-x-1", 0),
    ("x^4-4x^2+1", 3, "x^2-x-1", 0),
]


@lru_cache(maxsize=1)
def unit_pool() -> tuple[IntPoly, ...]:
    """Irreducible unit polynomials of degree <= 6 used for sampling."""
    from .polyint import is_irreducible, is_unit_poly

    pool = [parse_poly(s) for s in _BASE_POOL]
    for p, i, q, j in _DERIVED:
        u = product_unit(make_unit(parse_poly(p), i), make_unit(parse_poly(q), j))
        if u.degree <= 6 and u.minpoly not in pool:
            pool.append(u.minpoly)
    for p in pool:
        assert is_unit_poly(p) and is_irreducible(p), p
    return tuple(pool)


def sample_unit_pairs(count: int, seed: int, max_degree: int = 6) -> list[tuple[AlgebraicUnit, AlgebraicUnit]]:
    """Seeded pairs of units; about a third are conjugates of one polynomial."""
    rng = random.Random(seed)
    pool = [p for p in unit_pool() if p.degree <= max_degree]
    out = []
    for _ in range(count):
        p = rng.choice(pool)
        q = p if rng.random() < 1 / 3 else rng.choice(pool)
        out.append((make_unit(p, rng.randrange(p.degree)), make_unit(q, rng.randrange(q.degree))))
    return out


def all_conjugate_pairs(u: AlgebraicUnit) -> Iterable[tuple[AlgebraicUnit, AlgebraicUnit]]:
    cs = conjugates(u)
    return ((a, b) for a in cs for b in cs if a != b)
