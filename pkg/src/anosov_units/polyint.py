"""Exact arithmetic on univariate polynomials with integer coefficients.

Everything here works with Python's arbitrary-precision integers; rational
intermediates use :class:`fractions.Fraction`.  The composed polynomials
(:func:`product_poly`, :func:`power_poly`, :func:`sum_poly`) are obtained by
eliminating an auxiliary variable: the resultant ``Res_y(f(y), H(x, y))`` is
evaluated at enough integer points ``x`` and interpolated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd as igcd
from typing import Sequence

import flint

from .errors import CertificationError, PolyParseError

__all__ = [
    "IntPoly",
    "parse_poly",
    "poly_arith",
    "divexact",
    "poly_gcd",
    "resultant",
    "product_poly",
    "power_poly",
    "sum_poly",
    "reverse_poly",
    "is_unit_poly",
    "squarefree_decomposition",
    "squarefree_part",
    "factor_int_poly",
    "is_root_of_unity_poly",
]


@dataclass(frozen=True)
class IntPoly:
    """Integer polynomial, constant term first.

    The zero polynomial has ``coeffs == ()`` and degree -1.
    """

    coeffs: tuple[int, ...] = ()

    def __post_init__(self):
        cs = [int(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def x(cls, power: int = 1) -> IntPoly:
        return cls((0,) * power + (1,))

    @classmethod
    def from_flint(cls, p: flint.fmpz_poly) -> IntPoly:
        return cls(tuple(int(c) for c in p.coeffs()))

    def to_flint(self) -> flint.fmpz_poly:
        return flint.fmpz_poly(list(self.coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lc(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def is_monic(self) -> bool:
        return self.lc == 1

    def __getitem__(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __neg__(self) -> IntPoly:
        return IntPoly(tuple(-c for c in self.coeffs))

    def __add__(self, other: IntPoly) -> IntPoly:
        n = max(len(self.coeffs), len(other.coeffs))
        return IntPoly(tuple(self[i] + other[i] for i in range(n)))

    def __sub__(self, other: IntPoly) -> IntPoly:
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return IntPoly(tuple(c * other for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> IntPoly:
        result, base = IntPoly((1,)), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def derivative(self) -> IntPoly:
        return IntPoly(tuple(i * c for i, c in enumerate(self.coeffs))[1:])

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = igcd(g, c)
        return g

    def primitive(self) -> IntPoly:
        """Primitive part with positive leading coefficient."""
        if self.is_zero():
            return self
        g = self.content()
        if self.lc < 0:
            g = -g
        return IntPoly(tuple(c // g for c in self.coeffs))

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for e in range(self.degree, -1, -1):
            c = self.coeffs[e]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if e == 0:
                body = str(a)
            else:
                body = ("" if a == 1 else str(a)) + "x" + (f"^{e}" if e > 1 else "")
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += sign + body
        return out

    def __repr__(self) -> str:
        return f"IntPoly('{self}')"


# ---------------------------------------------------------------------------
# parsing

_INT = re.compile(r"\d+")


def parse_poly(text: str) -> IntPoly:
    """Parse ``3x^2-x+7`` style input, or a coefficient list ``7,-1,3``.

    The coefficient-list form is recognised by the presence of a comma and
    lists the constant term first.  A single optional leading sign is
    accepted so that every printed polynomial parses back.
    """
    if "," in text:
        return _parse_coefficient_list(text)
    pos = 0
    n = len(text)
    coeffs: dict[int, int] = {}

    def skip(p):
        while p < n and text[p].isspace():
            p += 1
        return p

    def read_int(p):
        m = _INT.match(text, p)
        if not m:
            return None, p
        end = m.end()
        if end < n and text[end] in ".eE/":
            raise PolyParseError("non-integer literal", p)
        return int(m.group()), end

    pos = skip(pos)
    if pos == n:
        raise PolyParseError("empty expression", pos)
    sign = 1
    if text[pos] in "+-":
        sign = -1 if text[pos] == "-" else 1
        pos = skip(pos + 1)
    while True:
        start = pos
        coef, pos = read_int(pos)
        pos = skip(pos)
        if pos < n and text[pos] == "x":
            pos = skip(pos + 1)
            exp = 1
            if pos < n and text[pos] == "^":
                pos = skip(pos + 1)
                exp, pos = read_int(pos)
                if exp is None:
                    raise PolyParseError("expected exponent", pos)
                pos = skip(pos)
            if coef is None:
                coef = 1
        elif coef is None:
            if pos < n and (text[pos] == "." or text[pos].isdigit()):
                raise PolyParseError("non-integer literal", pos)
            raise PolyParseError("expected term", start)
        else:
            exp = 0
        coeffs[exp] = coeffs.get(exp, 0) + sign * coef
        if pos == n:
            break
        if text[pos] not in "+-":
            if text[pos] == ".":
                raise PolyParseError("non-integer literal", pos)
            raise PolyParseError(f"unexpected character {text[pos]!r}", pos)
        sign = -1 if text[pos] == "-" else 1
        pos = skip(pos + 1)
        if pos == n:
            raise PolyParseError("dangling operator", pos)
    top = max(coeffs)
    return IntPoly(tuple(coeffs.get(i, 0) for i in range(top + 1)))


def _parse_coefficient_list(text: str) -> IntPoly:
    out = []
    offset = 0
    for field in text.split(","):
        s = field.strip()
        if not re.fullmatch(r"[+-]?\d+", s):
            kind = "non-integer literal" if re.fullmatch(r"[+-]?[\d.eE/+-]+", s) else "bad coefficient"
            raise PolyParseError(kind, offset + (len(field) - len(field.lstrip())))
        out.append(int(s))
        offset += len(field) + 1
    return IntPoly(tuple(out))


# ---------------------------------------------------------------------------
# arithmetic

def _q(p: IntPoly) -> list[Fraction]:
    return [Fraction(c) for c in p.coeffs]


def _trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _divmod_q(a: list[Fraction], b: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    a = _trim(list(a))
    b = _trim(list(b))
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if len(a) < len(b):
        return [], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    lead = b[-1]
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        t = a[-1] / lead
        q[shift] = t
        for i, c in enumerate(b):
            a[i + shift] -= t * c
        a.pop()
        _trim(a)
    return _trim(q), a


def _from_q(a: Sequence[Fraction]) -> IntPoly:
    if any(c.denominator != 1 for c in a):
        raise ValueError("quotient has non-integer coefficients")
    return IntPoly(tuple(int(c) for c in a))


def divexact(f: IntPoly, g: IntPoly) -> IntPoly:
    """Exact quotient ``f / g``; the quotient must have integer coefficients."""
    q, r = _divmod_q(_q(f), _q(g))
    if r:
        raise ValueError(f"divexact: {g} does not divide {f}")
    return _from_q(q)


def _prem(a: IntPoly, b: IntPoly) -> IntPoly:
    """Pseudo-remainder of ``lc(b)^(deg a - deg b + 1) * a`` modulo ``b``."""
    r = list(a.coeffs)
    db = b.degree
    lb = b.lc
    if len(r) - 1 < db:
        return a
    e = len(r) - 1 - db + 1
    while r and len(r) - 1 >= db:
        shift = len(r) - 1 - db
        t = r[-1]
        r = [c * lb for c in r]
        for i, c in enumerate(b.coeffs):
            r[i + shift] -= t * c
        r.pop()
        e -= 1
        _trim(r)
    return IntPoly(tuple(c * lb**e for c in r))


def poly_gcd(f: IntPoly, g: IntPoly) -> IntPoly:
    """Primitive gcd with positive leading coefficient (contents ignored)."""
    a, b = f.primitive(), g.primitive()
    if a.degree < b.degree:
        a, b = b, a
    while not b.is_zero():
        a, b = b, _prem(a, b).primitive()
    return a.primitive()


def poly_arith(f: IntPoly, g: IntPoly, op: str) -> IntPoly:
    ops = {
        "add": lambda: f + g,
        "sub": lambda: f - g,
        "mul": lambda: f * g,
        "divexact": lambda: divexact(f, g),
        "gcd": lambda: poly_gcd(f, g),
    }
    try:
        return ops[op]()
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None


# ---------------------------------------------------------------------------
# resultants and composed polynomials

def resultant(f: IntPoly, g: IntPoly) -> int:
    """``lc(f)^deg(g) * prod g(a)`` over the roots ``a`` of ``f``."""
    if f.is_zero() or g.is_zero():
        raise ValueError("resultant of the zero polynomial")
    a, b = _q(f), _q(g)
    acc = Fraction(1)
    while True:
        da, db = len(a) - 1, len(b) - 1
        if da == 0:
            return _as_int(acc * a[0] ** db)
        if db == 0:
            return _as_int(acc * b[0] ** da)
        _, r = _divmod_q(b, a)
        if not r:
            return 0
        dr = len(r) - 1
        # Res(a, b) = lc(a)^(db - dr) Res(a, r) and Res(a, r) = (-1)^(da*dr) Res(r, a)
        acc *= a[-1] ** (db - dr)
        if (da * dr) % 2:
            acc = -acc
        a, b = r, a


def _as_int(x: Fraction) -> int:
    if x.denominator != 1:
        raise CertificationError(f"resultant came out non-integral: {x}")
    return int(x)


def _interpolate(values: Sequence[int]) -> IntPoly:
    """Polynomial of degree < len(values) through ``(i, values[i])``."""
    diffs = [Fraction(v) for v in values]
    n = len(diffs)
    newton = []
    for k in range(n):
        newton.append(diffs[0])
        diffs = [(diffs[i + 1] - diffs[i]) / (k + 1) for i in range(len(diffs) - 1)]
    acc = [Fraction(0)]
    for k in range(n - 1, -1, -1):
        # acc = acc * (x - k) + newton[k]
        shifted = [Fraction(0)] + acc
        for i, c in enumerate(acc):
            shifted[i] -= k * c
        shifted[0] += newton[k]
        acc = shifted
    return _from_q(_trim(acc))


def _eliminate(f: IntPoly, h_at, npoints: int) -> IntPoly:
    """Interpolate ``x -> prod_a H(x, a)`` over the roots of monic ``f``."""
    values = []
    for x0 in range(npoints):
        h = IntPoly(h_at(x0))
        if h.is_zero():
            values.append(1 if f.degree == 0 else 0)
        else:
            values.append(resultant(f, h))
    return _interpolate(values)


def _require_monic(*polys: IntPoly):
    for p in polys:
        if p.is_zero() or not p.is_monic():
            raise ValueError(f"expected a monic polynomial, got {p}")


def product_poly(f: IntPoly, g: IntPoly) -> IntPoly:
    """Monic polynomial whose roots are all products ``a*b`` (with multiplicity)."""
    _require_monic(f, g)
    n = g.degree

    def h_at(x0):
        out = [0] * (n + 1)
        for i, c in enumerate(g.coeffs):
            out[n - i] = c * x0**i
        return out

    return _eliminate(f, h_at, f.degree * n + 1)


def power_poly(f: IntPoly, k: int) -> IntPoly:
    """Monic polynomial whose roots are the ``k``-th powers of the roots of ``f``."""
    _require_monic(f)
    if k < 1:
        raise ValueError("power_poly needs k >= 1")
    if k == 1:
        return f

    def h_at(x0):
        return [x0] + [0] * (k - 1) + [-1]

    return _eliminate(f, h_at, f.degree + 1)


def sum_poly(f: IntPoly, g: IntPoly, k: int = 1) -> IntPoly:
    """Monic polynomial whose roots are all sums ``a + k*b``."""
    _require_monic(f, g)
    if k == 0:
        raise ValueError("shift must be nonzero")
    n = g.degree
    # g_k has roots k*b and is monic
    gk = [c * k ** (n - i) for i, c in enumerate(g.coeffs)]

    def h_at(x0):
        # expand g_k(x0 - y) in powers of y
        out = [0] * (n + 1)
        for i, c in enumerate(gk):
            if c:
                for j in range(i + 1):
                    out[j] += c * comb(i, j) * x0 ** (i - j) * (-1) ** j
        return out

    return _eliminate(f, h_at, f.degree * n + 1)


def reverse_poly(f: IntPoly) -> IntPoly:
    """``x^deg f * f(1/x)``, sign-normalised to a positive leading coefficient."""
    if f.is_zero() or f[0] == 0:
        raise ValueError("reverse_poly needs a nonzero constant term")
    r = IntPoly(tuple(reversed(f.coeffs)))
    return -r if r.lc < 0 else r


def is_unit_poly(f: IntPoly) -> bool:
    return f.is_monic() and abs(f[0]) == 1


# ---------------------------------------------------------------------------
# factorization

def squarefree_decomposition(f: IntPoly) -> list[tuple[IntPoly, int]]:
    """Yun's algorithm: primitive squarefree ``a_i`` with ``prim(f) = prod a_i^i``."""
    p = f.primitive()
    if p.degree < 1:
        return []
    out = []
    dp = p.derivative()
    a0 = poly_gcd(p, dp)
    b = _qdiv(p, a0)
    c = _qdiv(dp, a0)
    d = c - b.derivative()
    i = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        if a.degree > 0:
            out.append((a, i))
        b = _qdiv(b, a)
        c = _qdiv(d, a)
        d = c - b.derivative()
        i += 1
    return out


def _qdiv(a: IntPoly, b: IntPoly) -> IntPoly:
    """Exact division over Q followed by clearing denominators."""
    q, r = _divmod_q(_q(a), _q(b))
    if r:
        raise CertificationError(f"{b} does not divide {a}")
    den = 1
    for c in q:
        den = den * c.denominator // igcd(den, c.denominator)
    return IntPoly(tuple(int(c * den) for c in q))


def factor_int_poly(f: IntPoly) -> list[tuple[IntPoly, int]]:
    """Irreducible primitive factors of ``f`` with multiplicities.

    ``content(f) * prod(q**e)`` reproduces ``f`` exactly (the content carries
    the sign); this is checked before returning.  Squarefree parts are split
    by FLINT's Zassenhaus/van Hoeij factorizer.
    """
    if f.is_zero():
        raise ValueError("cannot factor the zero polynomial")
    out: list[tuple[IntPoly, int]] = []
    for part, mult in squarefree_decomposition(f):
        c, pieces = part.to_flint().factor()
        qs = [IntPoly.from_flint(q) for q, e in pieces for _ in range(int(e))]
        check = IntPoly((int(c),))
        for q in qs:
            check = check * q
        if check != part:
            raise CertificationError(f"factors of {part} do not multiply back")
        out.extend((q.primitive(), mult) for q in qs)
    merged: dict[IntPoly, int] = {}
    for q, e in out:
        merged[q] = merged.get(q, 0) + e
    result = sorted(merged.items(), key=lambda qe: (qe[0].degree, qe[0].coeffs))
    check = IntPoly((f.content() * (1 if f.lc > 0 else -1),))
    for q, e in result:
        check = check * q**e
    if check != f:
        raise CertificationError(f"factorization of {f} does not multiply back")
    return result


def squarefree_part(f: IntPoly) -> IntPoly:
    """Product of the distinct irreducible factors of ``f`` (primitive)."""
    p = f.primitive()
    if p.degree < 1:
        return p
    return _qdiv(p, poly_gcd(p, p.derivative())).primitive()


def factors_of(f: IntPoly) -> list[IntPoly]:
    """Distinct irreducible factors of positive degree."""
    return [q for q, _ in factor_int_poly(f) if q.degree > 0]


def is_irreducible(f: IntPoly) -> bool:
    fs = factor_int_poly(f)
    return f.degree > 0 and len(fs) == 1 and fs[0][1] == 1 and f.content() == 1


# ---------------------------------------------------------------------------
# Kronecker

def is_root_of_unity_poly(f: IntPoly) -> bool:
    """True iff every root of monic ``f`` is a root of unity.

    Repeatedly squares the roots.  For a degree ``d`` polynomial with all
    roots on the unit circle coefficient ``i`` is bounded by ``C(d, i)``, so
    the iteration either revisits a polynomial or breaks the bound.
    """
    if f.is_zero() or not f.is_monic():
        raise ValueError(f"expected a monic polynomial, got {f}")
    if f[0] == 0:
        raise ValueError("zero constant term")
    if abs(f[0]) != 1:
        return False
    d = f.degree
    bound = [comb(d, i) for i in range(d + 1)]
    seen = set()
    g = f
    while True:
        if any(abs(c) > b for c, b in zip(g.coeffs, bound)):
            return False
        if g in seen:
            return True
        seen.add(g)
        g = power_poly(g, 2)
