"""Algebraic units as exact values.

A unit is an irreducible monic integer polynomial with constant term ±1
together with the index of one of its roots in the canonical ordering of
:func:`anosov_units.roots.isolate_roots`.  Two units are equal exactly when
both the polynomial and the index agree, so equality never depends on a
floating tolerance.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Union

import flint
from flint import acb

from .errors import CertificationError
from .polyint import (
    IntPoly,
    factors_of,
    is_irreducible,
    is_root_of_unity_poly,
    is_unit_poly,
    poly_gcd,
    power_poly,
    product_poly,
    reverse_poly,
    sum_poly,
)
from .roots import RootBox, isolate_roots

__all__ = [
    "AlgebraicUnit",
    "CertificationWarning",
    "UnitWord",
    "make_unit",
    "rational_unit",
    "conjugates",
    "inverse_unit",
    "product_unit",
    "power_unit",
    "degree",
    "compositum_degree",
    "relative_degree",
    "is_pm_power_one",
    "is_root_of_unity",
    "find_power_relation",
    "evaluate_word",
    "word_to_unit",
    "words_equal",
    "SHIFT_BUDGET",
    "DEFAULT_K",
]

SHIFT_BUDGET = 16
DEFAULT_K = 8
_START_PREC = 64
_MAX_PREC = 4096


class CertificationWarning(UserWarning):
    """Formally distinct expressions turned out to be numerically equal."""


class AlgebraicUnit:
    """An algebraic unit: ``minpoly`` plus a selected root."""

    __slots__ = ("minpoly", "index")

    def __init__(self, minpoly: IntPoly, index: int):
        object.__setattr__(self, "minpoly", minpoly)
        object.__setattr__(self, "index", index)

    def __setattr__(self, name, value):
        raise AttributeError("AlgebraicUnit is immutable")

    @property
    def root(self) -> RootBox:
        return isolate_roots(self.minpoly)[self.index]

    @property
    def degree(self) -> int:
        return self.minpoly.degree

    @property
    def is_real(self) -> bool:
        return self.root.is_real

    def ball(self, prec: int = _START_PREC) -> acb:
        """Enclosure of the root with radius at most ``2**-prec``."""
        return _ball(self.minpoly, self.index, prec)

    def as_complex(self) -> complex:
        return self.root.as_complex()

    def __eq__(self, other):
        if not isinstance(other, AlgebraicUnit):
            return NotImplemented
        return self.minpoly == other.minpoly and self.index == other.index

    def __hash__(self):
        return hash((self.minpoly, self.index))

    def __repr__(self):
        z = self.as_complex()
        shown = f"{z.real:.6g}" if self.is_real else f"{z:.6g}"
        return f"AlgebraicUnit({self.minpoly}, root~{shown})"


@lru_cache(maxsize=8192)
def _ball(minpoly: IntPoly, index: int, prec: int) -> acb:
    eps = math.ldexp(1.0, -min(prec, 1000))
    return isolate_roots(minpoly, eps)[index].ball


def _identify(poly: IntPoly, enclose) -> int:
    """Index of the root of ``poly`` that ``enclose(prec)`` converges to.

    The caller guarantees the target is an exact root of ``poly``; the
    enclosure only has to become narrow enough to meet a single box.
    """
    boxes = isolate_roots(poly)
    if len(boxes) == 1:
        return 0
    prec = _START_PREC
    while prec <= _MAX_PREC:
        z = enclose(prec)
        hits = [b.index for b in boxes if b.ball.overlaps(z)]
        if len(hits) == 1:
            return hits[0]
        if not hits:
            raise CertificationError(f"no root of {poly} matches the enclosure {z}")
        prec *= 2
        boxes = isolate_roots(poly, math.ldexp(1.0, -min(prec, 1000)))
    raise CertificationError(f"root of {poly} not identified at {_MAX_PREC} bits")


def _unit_of(candidate: IntPoly, enclose) -> AlgebraicUnit:
    """The unit whose value lies in ``enclose`` and is a root of ``candidate``.

    ``candidate`` may be reducible; exactly one irreducible factor must
    vanish on the enclosure once precision suffices.
    """
    facs = factors_of(candidate)
    prec = _START_PREC
    while prec <= _MAX_PREC:
        z = enclose(prec)
        with flint.ctx.workprec(prec + 32):
            live = [q for q in facs if q.to_flint()(z).contains(0)]
        if len(live) == 1:
            q = live[0]
            return AlgebraicUnit(q, _identify(q, enclose))
        if not live:
            raise CertificationError(f"no factor of {candidate} vanishes at {z}")
        prec *= 2
    raise CertificationError(f"vanishing factor of {candidate} not isolated")


# ---------------------------------------------------------------------------
# construction

def make_unit(minpoly: IntPoly, which: Union[int, complex, float, RootBox] = 0) -> AlgebraicUnit:
    """Build a unit from its minimal polynomial and a root selector.

    ``which`` is a canonical root index, an approximate root value (the
    nearest root is taken and must be unambiguous), or a RootBox.
    """
    if not is_unit_poly(minpoly):
        raise ValueError(f"{minpoly} is not a unit polynomial")
    if not is_irreducible(minpoly):
        raise ValueError(f"{minpoly} is reducible")
    boxes = isolate_roots(minpoly)
    if isinstance(which, RootBox):
        hits = [b.index for b in boxes if b.ball.overlaps(which.ball)]
        if len(hits) != 1:
            raise ValueError("root box does not select a unique root")
        return AlgebraicUnit(minpoly, hits[0])
    if isinstance(which, bool):
        raise TypeError("root selector must be an index or a value")
    if isinstance(which, int):
        if not 0 <= which < len(boxes):
            raise IndexError(f"root index {which} out of range for degree {minpoly.degree}")
        return AlgebraicUnit(minpoly, which)
    z = complex(which)
    dist = sorted((abs(b.as_complex() - z), b.index) for b in boxes)
    if len(dist) > 1 and dist[1][0] - dist[0][0] < 1e-9 * max(1.0, dist[1][0]):
        raise ValueError(f"{z} does not select a unique root of {minpoly}")
    return AlgebraicUnit(minpoly, dist[0][1])


def rational_unit(sign: int) -> AlgebraicUnit:
    if sign not in (1, -1):
        raise ValueError("rational units are 1 and -1")
    return AlgebraicUnit(IntPoly((-sign, 1)), 0)


def conjugates(u: AlgebraicUnit) -> list[AlgebraicUnit]:
    return [AlgebraicUnit(u.minpoly, i) for i in range(u.degree)]


def degree(u: AlgebraicUnit) -> int:
    return u.minpoly.degree


# ---------------------------------------------------------------------------
# arithmetic

def _prec_ctx(prec):
    return flint.ctx.workprec(prec + 32)


def inverse_unit(u: AlgebraicUnit) -> AlgebraicUnit:
    """``u**-1``; its minimal polynomial is the (monic) reversal."""
    q = reverse_poly(u.minpoly)

    def enclose(prec):
        with _prec_ctx(prec):
            return 1 / u.ball(prec)

    return AlgebraicUnit(q, _identify(q, enclose))


def product_unit(u: AlgebraicUnit, v: AlgebraicUnit) -> AlgebraicUnit:
    def enclose(prec):
        with _prec_ctx(prec):
            return u.ball(prec) * v.ball(prec)

    return _unit_of(product_poly(u.minpoly, v.minpoly), enclose)


def power_unit(u: AlgebraicUnit, k: int) -> AlgebraicUnit:
    if k == 0:
        return rational_unit(1)
    if k < 0:
        return power_unit(inverse_unit(u), -k)
    if k == 1:
        return u

    def enclose(prec):
        with _prec_ctx(prec + 4 * k.bit_length()):
            return u.ball(prec + 4 * k.bit_length()) ** k

    return _unit_of(power_poly(u.minpoly, k), enclose)


def _sum_degree(u: AlgebraicUnit, v: AlgebraicUnit, k: int) -> int:
    def enclose(prec):
        with _prec_ctx(prec):
            return u.ball(prec) + k * v.ball(prec)

    s = sum_poly(u.minpoly, v.minpoly, k)
    facs = factors_of(s)
    prec = _START_PREC
    while prec <= _MAX_PREC:
        z = enclose(prec)
        with _prec_ctx(prec):
            live = [q for q in facs if q.to_flint()(z).contains(0)]
        if len(live) == 1:
            return live[0].degree
        prec *= 2
    raise CertificationError(f"minimal polynomial of u + {k}v not isolated")


def compositum_degree(u: AlgebraicUnit, v: AlgebraicUnit) -> int:
    """``[Q(u, v) : Q]`` via the degree of a primitive element ``u + k v``."""
    m, n = u.degree, v.degree
    if m == 1 or n == 1:
        return m * n
    if u.minpoly == v.minpoly and u.index == v.index:
        return m
    need = math.lcm(m, n)
    seen: dict[int, int] = {}
    best = 0
    for k in range(1, SHIFT_BUDGET + 1):
        d = _sum_degree(u, v, k)
        if d == m * n:
            return d
        best = max(best, d)
        seen[d] = seen.get(d, 0) + 1
        if d == best and d % need == 0 and seen[d] >= 2:
            return d
    raise CertificationError(f"no stable primitive element for ({u}, {v}) within {SHIFT_BUDGET} shifts")


def relative_degree(v: AlgebraicUnit, over: AlgebraicUnit) -> int:
    """``[Q(over, v) : Q(over)]``."""
    d, r = divmod(compositum_degree(over, v), over.degree)
    if r:
        raise CertificationError("compositum degree not divisible by the base degree")
    return d


def is_pm_power_one(u: AlgebraicUnit, n: int) -> bool:
    """Exactly decide ``u**n = ±1`` through ``minpoly | x^(2n) - 1``."""
    if n < 1:
        raise ValueError("n must be positive")
    target = IntPoly.x(2 * n) - IntPoly((1,))
    return poly_gcd(u.minpoly, target).degree == u.degree


def is_root_of_unity(u: AlgebraicUnit) -> bool:
    return is_root_of_unity_poly(u.minpoly)


def _exponents(K: int):
    yield 0
    for j in range(1, K + 1):
        yield j
        yield -j


def find_power_relation(gamma: AlgebraicUnit, alpha: AlgebraicUnit, mu: AlgebraicUnit,
                        K: int = DEFAULT_K) -> tuple[int, int] | None:
    """Search ``(j, s)`` with ``|j| <= K`` and ``gamma = mu**j * alpha**s``.

    Candidates are first filtered numerically; any surviving candidate is
    confirmed by exact unit equality.  ``None`` means no relation within K.
    """
    if K < 1:
        raise ValueError("K must be positive")
    prec = _START_PREC
    g = gamma.ball(prec)
    a = alpha.ball(prec)
    m = mu.ball(prec)
    for j in _exponents(K):
        for s in (1, -1):
            with _prec_ctx(prec + 8 * K):
                z = m ** j * a ** s if j >= 0 else a ** s / m ** (-j)
            if not z.overlaps(g):
                continue
            cand = product_unit(power_unit(mu, j), power_unit(alpha, s))
            if cand == gamma:
                return j, s
    return None


# ---------------------------------------------------------------------------
# formal words

@dataclass(frozen=True)
class UnitWord:
    """A formal product of named units, e.g. ``lam * alpha1^-1``.

    Factors are kept reduced: names sorted, exponents combined and nonzero.
    """

    factors: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        acc: dict[str, int] = {}
        for name, e in self.factors:
            acc[name] = acc.get(name, 0) + int(e)
        object.__setattr__(self, "factors", tuple(sorted((n, e) for n, e in acc.items() if e)))

    @classmethod
    def of(cls, *factors) -> UnitWord:
        """``UnitWord.of("lam", ("alpha1", -1))``."""
        return cls(tuple((f, 1) if isinstance(f, str) else f for f in factors))

    @classmethod
    def parse(cls, text: str) -> UnitWord:
        text = text.strip()
        if text in ("", "1"):
            return cls()
        out = []
        for part in text.split("*"):
            name, _, exp = part.strip().partition("^")
            if not name.isidentifier():
                raise ValueError(f"bad unit name {name!r}")
            out.append((name, int(exp) if exp else 1))
        return cls(tuple(out))

    def __mul__(self, other: UnitWord) -> UnitWord:
        return UnitWord(self.factors + other.factors)

    def __pow__(self, k: int) -> UnitWord:
        return UnitWord(tuple((n, e * k) for n, e in self.factors))

    def inverse(self) -> UnitWord:
        return self ** -1

    def names(self) -> set[str]:
        return {n for n, _ in self.factors}

    def __str__(self):
        if not self.factors:
            return "1"
        return "*".join(n if e == 1 else f"{n}^{e}" for n, e in self.factors)


Registry = Mapping[str, AlgebraicUnit]


def _check_names(w: UnitWord, registry: Registry):
    missing = w.names() - set(registry)
    if missing:
        raise KeyError(f"unregistered unit names: {sorted(missing)}")


def evaluate_word(w: UnitWord, registry: Registry, prec: int = _START_PREC) -> acb:
    _check_names(w, registry)
    with _prec_ctx(prec + 16):
        z = acb(1)
        for name, e in w.factors:
            b = registry[name].ball(prec + 16)
            z = z * (b ** e if e > 0 else 1 / b ** (-e))
    return z


def word_to_unit(w: UnitWord, registry: Registry) -> AlgebraicUnit:
    _check_names(w, registry)
    u = rational_unit(1)
    for name, e in w.factors:
        u = product_unit(u, power_unit(registry[name], e))
    return u


def words_equal(a: UnitWord, b: UnitWord, registry: Registry) -> bool:
    """Formal comparison first, then certified numeric separation.

    If the words differ formally but their values cannot be separated, the
    question is settled exactly and a CertificationWarning is issued when
    the values coincide.
    """
    if a == b:
        return True
    for prec in (64, 256):
        if not evaluate_word(a, registry, prec).overlaps(evaluate_word(b, registry, prec)):
            return False
    same = word_to_unit(a, registry) == word_to_unit(b, registry)
    if same:
        warnings.warn(f"distinct words {a} and {b} are equal as numbers", CertificationWarning)
    return same
