"""Exact nilpotent Lie algebras given by rational structure constants.

Basis indices are 1-based in every public interface (``e1 .. en``), as in
the bracket text format ``i j k q`` meaning ``c_ij^k = q``.  All linear
algebra is exact over the rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence

import flint

from .errors import JacobiViolation, NotNilpotent
from .obstruction import TypeSignature
from .polyint import IntPoly, is_irreducible, is_unit_poly, parse_poly
from .roots import is_hyperbolic
from .units import AlgebraicUnit, UnitWord, make_unit, words_equal

__all__ = [
    "NilLieAlgebra",
    "LinearMap",
    "EigenAssignment",
    "AbelianFactor",
    "make_lie_algebra",
    "parse_brackets",
    "format_brackets",
    "lower_central_series",
    "derived_algebra",
    "center",
    "type_of",
    "has_abelian_factor",
    "basis_components",
    "check_automorphism",
    "check_anosov_matrix",
    "characteristic_polynomial",
    "build_type94",
    "eigen_compat",
    "TYPE94_LABELS",
]

Vector = tuple[Fraction, ...]


def _q(x) -> Fraction:
    if isinstance(x, float):
        raise TypeError("floating-point coefficients are not accepted; use Fraction or 'p/q'")
    return Fraction(x)


# ---------------------------------------------------------------------------
# exact linear algebra on row vectors

def _to_mat(rows: Sequence[Vector], ncols: int) -> flint.fmpq_mat:
    flat = [flint.fmpq(v.numerator, v.denominator) for r in rows for v in r]
    return flint.fmpq_mat(len(rows), ncols, flat)


def _from_fmpq(x) -> Fraction:
    return Fraction(int(x.p), int(x.q))


def _rref(rows: Sequence[Vector], ncols: int) -> tuple[list[Vector], list[int]]:
    """Nonzero rows of the reduced echelon form and their pivot columns."""
    if not rows:
        return [], []
    m, rank = _to_mat(rows, ncols).rref()
    out, pivots = [], []
    for i in range(rank):
        r = tuple(_from_fmpq(m[i, j]) for j in range(ncols))
        out.append(r)
        pivots.append(next(j for j, v in enumerate(r) if v))
    return out, pivots


def span_basis(rows: Iterable[Vector], ncols: int) -> list[Vector]:
    return _rref([tuple(r) for r in rows], ncols)[0]


def _nullspace(rows: Sequence[Vector], ncols: int) -> list[Vector]:
    """Basis of ``{x : r . x = 0 for every row r}``."""
    red, pivots = _rref(rows, ncols)
    free = [j for j in range(ncols) if j not in pivots]
    out = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r, p in zip(red, pivots):
            x[p] = -r[f]
        out.append(tuple(x))
    return out


def _intersect(a: Sequence[Vector], b: Sequence[Vector], n: int) -> list[Vector]:
    if not a or not b:
        return []
    # x = sum s_i a_i = sum t_j b_j  <=>  [A^T | -B^T] (s, t) = 0
    rows = [tuple([a[i][c] for i in range(len(a))] + [-b[j][c] for j in range(len(b))]) for c in range(n)]
    sols = _nullspace(rows, len(a) + len(b))
    vecs = [tuple(sum(s[i] * a[i][c] for i in range(len(a))) for c in range(n)) for s in sols]
    return span_basis(vecs, n)


def _in_span(v: Vector, basis: Sequence[Vector], n: int) -> bool:
    return len(span_basis(list(basis) + [v], n)) == len(span_basis(basis, n))


# ---------------------------------------------------------------------------
# algebras

@dataclass(frozen=True)
class NilLieAlgebra:
    """Validated nilpotent Lie algebra; ``brackets`` maps ``(i, j)`` with
    ``i < j`` (0-based) to the nonzero coefficients ``{k: c_ij^k}``."""

    dim: int
    brackets: tuple[tuple[tuple[int, int], tuple[tuple[int, Fraction], ...]], ...]
    labels: tuple[str, ...]

    def table(self) -> dict[tuple[int, int], dict[int, Fraction]]:
        return {ij: dict(cs) for ij, cs in self.brackets}

    def constant(self, i: int, j: int, k: int) -> Fraction:
        """``c_ij^k`` with 1-based indices."""
        i, j, k = i - 1, j - 1, k - 1
        sign = 1
        if i > j:
            i, j, sign = j, i, -1
        return sign * self.table().get((i, j), {}).get(k, Fraction(0))

    def bracket(self, x: Sequence, y: Sequence) -> Vector:
        n = self.dim
        out = [Fraction(0)] * n
        for (i, j), cs in self.brackets:
            w = x[i] * y[j] - x[j] * y[i]
            if w:
                for k, c in cs:
                    out[k] += w * c
        return tuple(out)

    def basis_vector(self, i: int) -> Vector:
        """1-based."""
        return tuple(Fraction(int(k == i - 1)) for k in range(self.dim))

    def nonzero_constants(self) -> list[tuple[int, int, int, Fraction]]:
        """``(i, j, k, c)`` with 1-based indices and ``i < j``."""
        return [(i + 1, j + 1, k + 1, c) for (i, j), cs in self.brackets for k, c in cs]


def make_lie_algebra(dim: int, brackets: Iterable[Sequence], labels: Sequence[str] | None = None) -> NilLieAlgebra:
    """Validate ``[e_i, e_j] = sum_k c_ij^k e_k`` given as ``(i, j, k, c)`` (1-based).

    Entries for ``(j, i)`` are filled in by antisymmetry; entries given for
    both orders must agree.
    """
    if dim < 1:
        raise ValueError("dimension must be positive")
    table: dict[tuple[int, int], dict[int, Fraction]] = {}
    for entry in brackets:
        i, j, k, c = entry
        c = _q(c)
        for idx in (i, j, k):
            if not 1 <= idx <= dim:
                raise ValueError(f"basis index {idx} out of range 1..{dim}")
        if i == j:
            if c:
                raise ValueError(f"[e{i}, e{i}] must vanish")
            continue
        a, b, sign = (i - 1, j - 1, 1) if i < j else (j - 1, i - 1, -1)
        row = table.setdefault((a, b), {})
        val = sign * c
        if k - 1 in row and row[k - 1] != val:
            raise ValueError(f"conflicting entries for c_{i}{j}^{k}")
        row[k - 1] = val
    frozen = tuple(sorted(
        ((ij, tuple(sorted((k, c) for k, c in cs.items() if c))) for ij, cs in table.items()
         if any(cs.values())),
    ))
    if labels is None:
        labels = tuple(f"e{i + 1}" for i in range(dim))
    if len(labels) != dim:
        raise ValueError("one label per basis vector")
    L = NilLieAlgebra(dim, frozen, tuple(labels))
    _check_jacobi(L)
    lower_central_series(L)  # raises NotNilpotent
    return L


def _check_jacobi(L: NilLieAlgebra):
    e = [L.basis_vector(i + 1) for i in range(L.dim)]
    for a, b, c in combinations(range(L.dim), 3):
        x, y, z = e[a], e[b], e[c]
        r1 = L.bracket(L.bracket(x, y), z)
        r2 = L.bracket(L.bracket(y, z), x)
        r3 = L.bracket(L.bracket(z, x), y)
        res = tuple(p + q + s for p, q, s in zip(r1, r2, r3))
        if any(res):
            raise JacobiViolation((a + 1, b + 1, c + 1), res)


def lower_central_series(L: NilLieAlgebra) -> list[list[Vector]]:
    """Bases of ``C^0 = n, C^1 = [n, n], ...`` down to and including ``0``."""
    n = L.dim
    e = [L.basis_vector(i + 1) for i in range(n)]
    series = [span_basis(e, n)]
    while series[-1]:
        nxt = span_basis((L.bracket(x, y) for x in e for y in series[-1]), n)
        if len(nxt) == len(series[-1]):
            raise NotNilpotent(f"lower central series stabilizes at dimension {len(nxt)}")
        series.append(nxt)
    return series


def derived_algebra(L: NilLieAlgebra) -> list[Vector]:
    return lower_central_series(L)[1] if L.dim else []


def center(L: NilLieAlgebra) -> list[Vector]:
    n = L.dim
    # x in Z  <=>  sum_a x_a c_ab^k = 0 for all b, k
    rows = []
    for b in range(n):
        for k in range(n):
            rows.append(tuple(L.constant(a + 1, b + 1, k + 1) for a in range(n)))
    return _nullspace(rows, n)


def type_of(L: NilLieAlgebra) -> TypeSignature:
    dims = [len(s) for s in lower_central_series(L)]
    return TypeSignature(tuple(a - b for a, b in zip(dims, dims[1:])))


@dataclass(frozen=True)
class AbelianFactor:
    """Decomposition ``n = m (+) a`` with ``a`` abelian, as bases."""

    m: tuple[Vector, ...]
    a: tuple[Vector, ...]


def has_abelian_factor(L: NilLieAlgebra) -> Optional[AbelianFactor]:
    """A verified witness, or None when ``Z(n)`` lies inside ``[n, n]``."""
    n = L.dim
    Z = center(L)
    D = derived_algebra(L)
    ZD = _intersect(Z, D, n)
    if len(Z) == len(ZD):
        return None
    a: list[Vector] = []
    acc = list(ZD)
    for z in Z:
        if not _in_span(z, acc, n):
            a.append(z)
            acc.append(z)
    m = list(D)
    acc = list(D) + a
    for i in range(n):
        v = L.basis_vector(i + 1)
        if not _in_span(v, acc, n):
            m.append(v)
            acc.append(v)
    _verify_abelian_factor(L, m, a)
    return AbelianFactor(tuple(m), tuple(a))


def _verify_abelian_factor(L, m, a):
    n = L.dim
    e = [L.basis_vector(i + 1) for i in range(n)]
    if len(span_basis(m + a, n)) != n or len(m) + len(a) != n:
        raise AssertionError("m and a do not form a direct sum")
    if any(any(L.bracket(x, y)) for x in a for y in e):
        raise AssertionError("a is not central")
    if not all(_in_span(L.bracket(x, y), m, n) for x in e for y in m):
        raise AssertionError("m is not an ideal")


def basis_components(L: NilLieAlgebra) -> list[list[int]]:
    """Connected components (1-based) of the graph joining i, j, k when c_ij^k != 0.

    More than one component exhibits a decomposition into commuting ideals.
    """
    parent = list(range(L.dim))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (i, j), cs in L.brackets:
        for k, _ in cs:
            for u in (j, k):
                parent[find(u)] = find(i)
    groups: dict[int, list[int]] = {}
    for v in range(L.dim):
        groups.setdefault(find(v), []).append(v + 1)
    return sorted(groups.values())


# ---------------------------------------------------------------------------
# linear maps

@dataclass(frozen=True)
class LinearMap:
    """Square matrix acting on column vectors: ``T e_j`` is column ``j``."""

    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(_q(x) for x in r) for r in self.rows)
        if any(len(r) != len(rows) for r in rows):
            raise ValueError("linear map must be square")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def identity(cls, n: int) -> LinearMap:
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def diag(cls, entries: Sequence) -> LinearMap:
        n = len(entries)
        return cls(tuple(tuple(entries[i] if i == j else 0 for j in range(n)) for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __call__(self, v: Sequence) -> Vector:
        return tuple(sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in self.rows)

    def __matmul__(self, other: LinearMap) -> LinearMap:
        cols = list(zip(*other.rows))
        return LinearMap(tuple(tuple(sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols)
                               for r in self.rows))

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)


def check_automorphism(L: NilLieAlgebra, T: LinearMap) -> bool:
    """``T [x, y] = [T x, T y]`` on all basis pairs, and ``T`` invertible."""
    if T.dim != L.dim:
        raise ValueError("dimension mismatch")
    n = L.dim
    if n and _to_mat(T.rows, n).det() == 0:
        return False
    e = [L.basis_vector(i + 1) for i in range(n)]
    cols = [T.column(j) for j in range(n)]
    for i, j in combinations(range(n), 2):
        if T(L.bracket(e[i], e[j])) != L.bracket(cols[i], cols[j]):
            return False
    return True


def characteristic_polynomial(T: LinearMap) -> IntPoly:
    """Characteristic polynomial of an integer matrix."""
    n = T.dim
    if any(x.denominator != 1 for r in T.rows for x in r):
        raise ValueError("integer matrix required")
    m = flint.fmpz_mat(n, n, [int(x) for r in T.rows for x in r])
    return IntPoly.from_flint(m.charpoly())


def check_anosov_matrix(T: LinearMap) -> bool:
    """Integer entries, determinant ±1, hyperbolic unit characteristic polynomial."""
    if any(x.denominator != 1 for r in T.rows for x in r):
        return False
    chi = characteristic_polynomial(T)
    if abs(chi[0]) != 1 or not is_unit_poly(chi):
        return False
    return is_hyperbolic(chi)


# ---------------------------------------------------------------------------
# text format

def parse_brackets(text: str) -> tuple[int | None, list[tuple[int, int, int, Fraction]]]:
    """Parse ``i j k p/q`` lines; an optional ``dim N`` line fixes the dimension."""
    dim = None
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "dim" and len(parts) == 2:
            dim = int(parts[1])
            continue
        if len(parts) != 4:
            raise ValueError(f"line {lineno}: expected 'i j k q', got {raw!r}")
        try:
            i, j, k = (int(p) for p in parts[:3])
            q = Fraction(parts[3])
        except ValueError:
            raise ValueError(f"line {lineno}: malformed entry {raw!r}") from None
        if "." in parts[3] or "e" in parts[3].lower():
            raise ValueError(f"line {lineno}: coefficient must be an integer or p/q")
        out.append((i, j, k, q))
    return dim, out


def format_brackets(L: NilLieAlgebra) -> str:
    lines = [f"dim {L.dim}"]
    for i, j, k, c in L.nonzero_constants():
        lines.append(f"{i} {j} {k} {c}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# the 13-dimensional family

TYPE94_LABELS = ("X1", "X2", "X3", "Y1", "Y2", "Y3", "Y4", "Y5", "Y6", "Z1", "Z2", "W1", "W2")


@dataclass(frozen=True)
class EigenAssignment:
    words: tuple[UnitWord, ...]
    registry: Mapping[str, AlgebraicUnit]

    def __post_init__(self):
        for w in self.words:
            missing = w.names() - set(self.registry)
            if missing:
                raise KeyError(f"unregistered unit names: {sorted(missing)}")

    def __getitem__(self, i: int) -> UnitWord:
        """1-based."""
        return self.words[i - 1]

    def replace(self, i: int, word: UnitWord) -> EigenAssignment:
        w = list(self.words)
        w[i - 1] = word
        return EigenAssignment(tuple(w), self.registry)


def _check_unit_poly(p: IntPoly, deg: int, what: str):
    if p.degree != deg or not is_unit_poly(p) or not is_irreducible(p) or not is_hyperbolic(p):
        raise ValueError(f"{what} must be an irreducible hyperbolic unit polynomial of degree {deg}, got {p}")


def build_type94(a=1, b=1, c=1, d=1, cubic: IntPoly | str = "x^3-3x+1",
                 quadratic: IntPoly | str = "x^2-3x+1") -> tuple[NilLieAlgebra, EigenAssignment]:
    """The 13-dimensional 2-step algebra with parameters ``a, b, c, d``.

    Brackets: [X1,Y1]=Z1, [X2,Y2]=W1, [X1,Y4]=Z2, [X2,Y5]=W2,
    [X3,Y3]=aZ1+bW1, [X3,Y6]=cZ2+dW2.
    """
    cubic = parse_poly(cubic) if isinstance(cubic, str) else cubic
    quadratic = parse_poly(quadratic) if isinstance(quadratic, str) else quadratic
    _check_unit_poly(cubic, 3, "cubic")
    _check_unit_poly(quadratic, 2, "quadratic")
    a, b, c, d = (_q(x) for x in (a, b, c, d))
    ix = {name: i + 1 for i, name in enumerate(TYPE94_LABELS)}
    br = [
        ("X1", "Y1", "Z1", 1), ("X2", "Y2", "W1", 1),
        ("X1", "Y4", "Z2", 1), ("X2", "Y5", "W2", 1),
        ("X3", "Y3", "Z1", a), ("X3", "Y3", "W1", b),
        ("X3", "Y6", "Z2", c), ("X3", "Y6", "W2", d),
    ]
    L = make_lie_algebra(13, [(ix[x], ix[y], ix[z], q) for x, y, z, q in br if q], TYPE94_LABELS)

    lam = make_unit(quadratic, 1)
    registry = {"lam": lam}
    for i in range(3):
        registry[f"alpha{i + 1}"] = make_unit(cubic, i)
    W = UnitWord.of
    words = [W(f"alpha{i}") for i in (1, 2, 3)]
    words += [W("lam", (f"alpha{i}", -1)) for i in (1, 2, 3)]
    words += [W(("lam", -1), (f"alpha{i}", -1)) for i in (1, 2, 3)]
    words += [W("lam"), W(("lam", -1)), W("lam"), W(("lam", -1))]
    return L, EigenAssignment(tuple(words), registry)


def eigen_compat(L: NilLieAlgebra, E: EigenAssignment) -> bool:
    """Every nonzero ``c_ij^k`` satisfies ``E(i) E(j) = E(k)``."""
    if len(E.words) != L.dim:
        raise ValueError("eigen assignment must cover every basis vector")
    return all(words_equal(E[i] * E[j], E[k], E.registry) for i, j, k, _ in L.nonzero_constants())
