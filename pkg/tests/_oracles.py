"""Independent numeric and symbolic references used by the tests."""

import random

import mpmath
import sympy

X = sympy.Symbol("x")


def to_sympy(p):
    return sympy.Poly(list(reversed(p.coeffs)), X)


def random_unit_poly(rng: random.Random, max_degree=6, bound=10):
    from anosov_units.polyint import IntPoly

    d = rng.randint(1, max_degree)
    cs = [rng.choice((-1, 1))] + [rng.randint(-bound, bound) for _ in range(d - 1)] + [1]
    return IntPoly(tuple(cs))


def random_palindromic(rng: random.Random, half_degree=3, bound=6):
    from anosov_units.polyint import IntPoly

    d = 2 * rng.randint(1, half_degree)
    half = [1] + [rng.randint(-bound, bound) for _ in range(d // 2 - 1)]
    mid = [rng.randint(-bound, bound)]
    return IntPoly(tuple(half + mid + half[::-1]))


def roots_with_multiplicity(p, dps=40):
    """Roots of ``p`` via sympy's factorization and mpmath's polyroots."""
    out = []
    with mpmath.workdps(dps):
        for fac, e in to_sympy(p).factor_list()[1]:
            cs = [int(c) for c in fac.all_coeffs()]
            if len(cs) == 1:
                continue
            rs = mpmath.polyroots(cs, maxsteps=400, extraprec=4 * dps)
            out += [complex(r) for r in rs] * e
    return out


def match_multisets(xs, ys, tol):
    """Greedy nearest matching; true iff every element finds a partner within ``tol``."""
    if len(xs) != len(ys):
        return False
    rest = list(ys)
    for x in xs:
        j = min(range(len(rest)), key=lambda k: abs(rest[k] - x))
        if abs(rest[j] - x) > tol:
            return False
        rest.pop(j)
    return True
