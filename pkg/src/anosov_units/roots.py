"""Certified complex roots and exact hyperbolicity decisions.

Root enclosures come from FLINT's certified isolation (``arb`` ball
arithmetic).  Hyperbolicity is never decided numerically: unit-circle roots
of a real polynomial are shared with its reversal, and the shared part is
examined through ``t = x + 1/x`` with a Sturm count on ``[-2, 2]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import flint
from flint import acb, arb

from .errors import CertificationError
from .polyint import IntPoly, poly_gcd, reverse_poly, squarefree_part

__all__ = [
    "RootBox",
    "isolate_roots",
    "is_hyperbolic",
    "modulus_margin",
    "unit_circle_root_count",
    "DEFAULT_EPS",
]

DEFAULT_EPS = 1e-12
_BASE_PREC = 64
_MAX_PREC = 1 << 16


@dataclass(frozen=True, eq=False)
class RootBox:
    """Enclosure of exactly one root.

    ``center`` is an exact complex point and every point of ``ball`` lies
    within ``radius`` of it.  ``index`` is the root's ordinal in the
    canonical ordering of :func:`isolate_roots` (real roots ascending, then
    conjugate pairs by real part, upper half-plane first).
    """

    center: acb
    radius: arb
    index: int
    is_real: bool
    ball: acb = field(repr=False)

    @classmethod
    def from_ball(cls, ball: acb, index: int) -> RootBox:
        is_real = ball.imag.is_exact() and ball.imag.is_zero()
        radius = arb(ball.real.rad()) + arb(ball.imag.rad())
        return cls(ball.mid(), radius, index, is_real, ball)

    @property
    def radius_float(self) -> float:
        return math.nextafter(float(self.radius.mid() + self.radius.rad()), math.inf)

    def overlaps(self, other: "acb | RootBox") -> bool:
        return self.ball.overlaps(other.ball if isinstance(other, RootBox) else other)

    def as_complex(self) -> complex:
        return complex(float(self.center.real), float(self.center.imag))

    def __repr__(self) -> str:
        z = self.as_complex()
        return f"RootBox(index={self.index}, center={z:.12g}, radius={self.radius_float:.3g})"


def _flint_roots(p: IntPoly, prec: int) -> list[acb]:
    with flint.ctx.workprec(prec):
        return [r for r, _ in p.to_flint().complex_roots()]


def _sort_key(b: acb):
    re = float(b.real.mid())
    im = float(b.imag.mid())
    real = b.imag.is_exact() and b.imag.is_zero()
    return (0 if real else 1, re, -im)


@lru_cache(maxsize=4096)
def _base_boxes(p: IntPoly) -> tuple[RootBox, ...]:
    balls = sorted(_flint_roots(p, _BASE_PREC), key=_sort_key)
    if len(balls) != p.degree:
        raise CertificationError(f"expected {p.degree} roots of {p}, got {len(balls)}")
    return tuple(RootBox.from_ball(b, i) for i, b in enumerate(balls))


@lru_cache(maxsize=4096)
def _boxes_at(p: IntPoly, eps: float) -> tuple[RootBox, ...]:
    base = _base_boxes(p)
    if all(b.radius_float <= eps for b in base):
        return base
    prec = _BASE_PREC
    while prec < _MAX_PREC:
        prec *= 2
        balls = _flint_roots(p, prec)
        matched: list[RootBox | None] = [None] * len(base)
        for ball in balls:
            hits = [b.index for b in base if b.overlaps(ball)]
            if len(hits) != 1:
                break
            matched[hits[0]] = RootBox.from_ball(ball, hits[0])
        else:
            if None not in matched and all(b.radius_float <= eps for b in matched):
                return tuple(matched)
    raise CertificationError(f"could not isolate roots of {p} to radius {eps}")


def isolate_roots(f: IntPoly, eps: float = DEFAULT_EPS) -> list[RootBox]:
    """One certified box per distinct root of ``f``, each of radius <= eps."""
    if f.is_zero():
        raise ValueError("zero polynomial has no isolated roots")
    p = squarefree_part(f)
    if p.degree < 1:
        return []
    return list(_boxes_at(p, float(eps)))


# ---------------------------------------------------------------------------
# hyperbolicity

def _palindromic_to_t(d: IntPoly) -> IntPoly:
    """``D`` with ``d(x) = x^k D(x + 1/x)`` for palindromic ``d`` of degree 2k."""
    k = d.degree // 2
    t = IntPoly.x()
    # V_j(t) = x^j + x^-j
    prev, cur = IntPoly((2,)), t
    out = IntPoly((d[k],))
    for j in range(1, k + 1):
        out = out + cur * d[k + j]
        prev, cur = cur, t * cur - prev
    return out


def _sturm_count(p: IntPoly, lo: int, hi: int) -> int:
    """Distinct real roots of squarefree ``p`` in ``(lo, hi]``."""
    seq = [[Fraction(c) for c in p.coeffs], [Fraction(c) for c in p.derivative().coeffs]]
    while len(seq[-1]) > 1:
        r = _rem(seq[-2], seq[-1])
        if not r:
            break
        seq.append([-c for c in r])

    def changes(x):
        vals = []
        for s in seq:
            v = Fraction(0)
            for c in reversed(s):
                v = v * x + c
            if v != 0:
                vals.append(v > 0)
        return sum(1 for u, w in zip(vals, vals[1:]) if u != w)

    return changes(lo) - changes(hi)


def _rem(a, b):
    a = list(a)
    while len(a) >= len(b) and a:
        t = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, c in enumerate(b):
            a[i + shift] -= t * c
        a.pop()
        while a and a[-1] == 0:
            a.pop()
    return a


def unit_circle_root_count(f: IntPoly) -> int:
    """Number of distinct roots of ``f`` with absolute value exactly 1."""
    if f.is_zero() or f[0] == 0:
        raise ValueError("polynomial must have a nonzero constant term")
    d = poly_gcd(f, reverse_poly(f))
    if d.degree < 1:
        return 0
    d = squarefree_part(d)
    count = 0
    for r in (1, -1):
        if d(r) == 0:
            count += 1
            d = squarefree_part(_div_linear(d, r))
    if d.degree < 1:
        return count
    if d.degree % 2 or any(d[i] != d[d.degree - i] for i in range(d.degree + 1)):
        raise CertificationError(f"inversion-closed factor {d} is not palindromic")
    return count + 2 * _sturm_count(_palindromic_to_t(d), -2, 2)


def _div_linear(d: IntPoly, r: int) -> IntPoly:
    # synthetic division by (x - r)
    cs = list(d.coeffs)
    out = [0] * (len(cs) - 1)
    acc = 0
    for i in range(len(cs) - 1, 0, -1):
        acc = acc * r + cs[i]
        out[i - 1] = acc
    return IntPoly(tuple(out))


def is_hyperbolic(f: IntPoly) -> bool:
    """True iff no root of ``f`` lies on the unit circle (decided exactly)."""
    return unit_circle_root_count(f) == 0


def modulus_margin(f: IntPoly, eps: float = DEFAULT_EPS) -> float:
    """Certified lower bound on ``min | |z| - 1 |`` over the roots of ``f``."""
    if not is_hyperbolic(f):
        raise ValueError(f"{f} has roots on the unit circle")
    while True:
        boxes = isolate_roots(f, eps)
        margins = []
        for b in boxes:
            lo, hi = b.ball.abs_lower(), b.ball.abs_upper()
            if lo > 1:
                margins.append(lo - 1)
            elif hi < 1:
                margins.append(1 - hi)
            else:
                break
        else:
            if not margins:
                return math.inf
            m = min(margins, key=lambda a: float(a.lower()))
            return math.nextafter(float(m.lower()), 0.0)
        eps /= 1 << 20
        if eps < 1e-300:
            raise CertificationError(f"margin of {f} not certified")
