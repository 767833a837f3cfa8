"""Screening nilpotent types by the degrees of their eigenvalue polynomials.

A type ``(n_1, ..., n_r)`` is screened shape by shape.  A shape fixes the
degrees of the irreducible factors of the characteristic polynomial on each
layer.  Every root on layer 2 is a product of two generator roots, and every
root on layer 3 is a generator root times a layer-2 root.  When the algebra
has no abelian factor, every generator factor must also take part in some
product that lands on a later layer.  Each elimination is recorded as a list
of steps that can be re-checked independently of the search that found them.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Any, ClassVar, Iterator, Optional, Sequence, Union

from .errors import CertificationError
from .lemmas import DegreeTriple, RuleId, orientations, refire, triple_firing
from .polyint import IntPoly, is_irreducible, is_unit_poly
from .roots import is_hyperbolic
from .units import (
    DEFAULT_K,
    AlgebraicUnit,
    find_power_relation,
    inverse_unit,
    make_unit,
    product_unit,
)

__all__ = [
    "TypeSignature",
    "FactorShape",
    "ProofStep",
    "ProofTrace",
    "Infeasible",
    "SurvivesScreen",
    "Verdict",
    "enumerate_types",
    "enumerate_shapes",
    "screen_type",
    "sweep",
    "reduce_by_abelian_factor",
    "split_type_n2",
    "SplitResult",
    "check_step",
    "replay_trace",
    "replay_steps",
    "DIM_GUARD",
]

DIM_GUARD = 16
LAYER_NAMES = "fgh"


@dataclass(frozen=True, order=True)
class TypeSignature:
    parts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(int(p) for p in self.parts))
        if not self.parts or any(p < 1 for p in self.parts):
            raise ValueError(f"bad type signature {self.parts}")

    @property
    def dim(self) -> int:
        return sum(self.parts)

    @property
    def steps(self) -> int:
        return len(self.parts)

    @property
    def feasible(self) -> bool:
        p = self.parts
        if any(x < 2 for x in p):
            return False
        if len(p) >= 2 and p[1] > p[0] * (p[0] - 1) // 2:
            return False
        return all(p[i + 1] <= p[0] * p[i] for i in range(1, len(p) - 1))

    def __str__(self):
        return "(" + ",".join(map(str, self.parts)) + ")"


@dataclass(frozen=True)
class FactorShape:
    """Irreducible-factor degrees per layer; each layer stored ascending."""

    layers: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(tuple(sorted(int(d) for d in ly)) for ly in self.layers))

    def labelled(self, layer: int) -> list[tuple[str, int]]:
        """Factors of one layer as ``(label, degree)``, largest degree first."""
        name = LAYER_NAMES[layer]
        return [(f"{name}{i + 1}", d) for i, d in enumerate(sorted(self.layers[layer], reverse=True))]

    def to_json(self) -> dict[str, list[int]]:
        return {LAYER_NAMES[i]: list(ly) for i, ly in enumerate(self.layers)}

    @classmethod
    def from_json(cls, d: dict) -> FactorShape:
        return cls(tuple(tuple(d[LAYER_NAMES[i]]) for i in range(len(d))))

    def __str__(self):
        return ", ".join(f"{LAYER_NAMES[i]}={{{','.join(map(str, ly))}}}" for i, ly in enumerate(self.layers))


@dataclass(frozen=True)
class ProofStep:
    case: str
    data: dict[str, Any]
    rule: RuleId

    @property
    def citation(self) -> str:
        return self.rule.citation

    def to_json(self) -> dict[str, Any]:
        return {"case": self.case, "data": self.data, "rule": self.rule.value, "citation": self.citation}

    @classmethod
    def from_json(cls, d: dict) -> ProofStep:
        return cls(d["case"], d["data"], RuleId(d["rule"]))


@dataclass(frozen=True)
class ProofTrace:
    type: TypeSignature
    no_abelian_factor: bool
    steps: tuple[ProofStep, ...] = ()

    def to_json(self) -> list[dict[str, Any]]:
        return [s.to_json() for s in self.steps]

    def canonical(self) -> bytes:
        return _canonical(self.to_json())

    def rules(self) -> set[RuleId]:
        return {s.rule for s in self.steps}


@dataclass(frozen=True)
class Infeasible:
    trace: ProofTrace
    feasible: ClassVar[bool] = False

    @property
    def survivors(self) -> tuple:
        return ()


@dataclass(frozen=True)
class SurvivesScreen:
    """Not eliminated by the implemented rules.  Carries no existence claim."""

    survivors: tuple[tuple[FactorShape, dict[str, Any]], ...]
    trace: ProofTrace = field(default=None)
    feasible: ClassVar[bool] = True

    def shapes(self) -> list[FactorShape]:
        return [s for s, _ in self.survivors]


Verdict = Union[Infeasible, SurvivesScreen]


def _canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode()


# ---------------------------------------------------------------------------
# enumeration

def _compositions(total: int, k: int, lo: int) -> Iterator[tuple[int, ...]]:
    if k == 1:
        if total >= lo:
            yield (total,)
        return
    for first in range(total - lo * (k - 1), lo - 1, -1):
        for rest in _compositions(total - first, k - 1, lo):
            yield (first,) + rest


def enumerate_types(dim: int, steps: int) -> list[TypeSignature]:
    """Feasible signatures of the given length, descending lexicographically."""
    if dim < 2:
        raise ValueError("dim must be at least 2")
    if steps < 1:
        raise ValueError("steps must be positive")
    out = [TypeSignature(c) for c in _compositions(dim, steps, 2)]
    return [t for t in out if t.feasible]


def _partitions(total: int, lo: int = 2) -> Iterator[tuple[int, ...]]:
    """Partitions into parts >= lo, each as a descending tuple, in reverse lex order."""
    def rec(rem, cap):
        if rem == 0:
            yield ()
            return
        for p in range(min(rem, cap), lo - 1, -1):
            for rest in rec(rem - p, p):
                yield (p,) + rest
    yield from rec(total, total)


def enumerate_shapes(t: TypeSignature) -> list[FactorShape]:
    per_layer = [list(_partitions(n)) for n in t.parts]
    return [FactorShape(layers) for layers in product(*per_layer)]


# ---------------------------------------------------------------------------
# edges of the pairing problem

@dataclass(frozen=True)
class _Edge:
    left: str
    right: str
    target: str
    triple: tuple[int, int, int]
    same_factor: bool


def _edges(shape: FactorShape) -> list[_Edge]:
    """Every product a root of ``left`` times a root of ``right`` landing in ``target``."""
    F = shape.labelled(0)
    later = [shape.labelled(i) for i in range(1, len(shape.layers))]
    out = []
    targets_ff = [x for layer in later for x in layer]
    for i, (li, di) in enumerate(F):
        for lj, dj in F[i:]:
            # smaller degree first, matching the usual reading deg a <= deg b
            for lk, dk in targets_ff:
                out.append(_Edge(lj, li, lk, (dj, di, dk), li == lj))
    if len(later) == 2:
        for li, di in F:
            for lj, dj in later[0]:
                for lk, dk in later[1]:
                    out.append(_Edge(li, lj, lk, (di, dj, dk), False))
    return out


def _covering_edges(shape: FactorShape, target: str, edges: list[_Edge]) -> list[_Edge]:
    """Edges able to produce the roots of ``target``.

    Layer-2 roots are products of two generator roots; layer-3 roots are a
    generator root times a layer-2 root.
    """
    layer = LAYER_NAMES.index(target[0])
    from_layer = 0 if layer == 1 else 1
    return [e for e in edges if e.target == target and LAYER_NAMES.index(e.right[0]) == from_layer]


def _firing(e: _Edge):
    return triple_firing(DegreeTriple(*e.triple), e.same_factor)


def _triple_step(case, base, e: _Edge, fire) -> ProofStep:
    data = dict(base)
    data.update({
        "kind": "triple",
        "pair": [e.left, e.right],
        "target": e.target,
        "triple": list(e.triple),
        "same_factor": e.same_factor,
        "orientation": list(fire.orientation),
    })
    return ProofStep(case, data, fire.rule)


def _f_edges(edges: list[_Edge], label: str) -> list[_Edge]:
    return [e for e in edges if e.left == label or e.right == label]


def _edge_key(e: _Edge, label: str) -> list[str]:
    partner = e.right if e.left == label else e.left
    return [partner, e.target]


_ASSERTED_COLLISIONS = {
    # (f shape, later layers) -> (partner degree, target degree, rule)
    ((2, 2, 6), ((3,),)): (6, 3, RuleId.PaperCase10_3),
    ((2, 2, 3), ((6,),)): (3, 6, RuleId.PaperCase7_6i),
}


def _collision(shape: FactorShape, allowed: dict[str, list[_Edge]]):
    """Two quadratic generator factors whose only products share partner and target."""
    quads = [lab for lab, d in shape.labelled(0) if d == 2]
    sigs = {}
    for q in quads:
        keys = sorted({tuple(_edge_key(e, q)) for e in allowed[q]})
        if len(keys) == 1 and keys[0][0] not in quads:
            sigs.setdefault(keys[0], []).append(q)
    for key in sorted(sigs):
        if len(sigs[key]) >= 2:
            return sigs[key][:2], key[0], key[1]
    return None


def _case_label(t: TypeSignature, shape: FactorShape) -> str:
    return f"Case {t}: {shape}"


def _screen_shape(t: TypeSignature, shape: FactorShape, no_abelian_factor: bool):
    """``(steps, None)`` if eliminated, ``([], assignment)`` if it survives."""
    case = _case_label(t, shape)
    base = {"type": list(t.parts), "shape": shape.to_json(), "no_abelian_factor": no_abelian_factor}
    edges = _edges(shape)
    fires = {e: _firing(e) for e in edges}
    assignment: dict[str, Any] = {}

    for layer in range(1, len(shape.layers)):
        for label, _ in shape.labelled(layer):
            cover = _covering_edges(shape, label, edges)
            ok = [e for e in cover if fires[e] is None]
            if not ok:
                return [_triple_step(case, base, e, fires[e]) for e in cover], None
            assignment[label] = [ok[0].left, ok[0].right]

    if not no_abelian_factor:
        return [], assignment

    allowed = {}
    for label, _ in shape.labelled(0):
        mine = _f_edges(edges, label)
        ok = [e for e in mine if fires[e] is None]
        if not ok:
            steps = [_triple_step(case, base, e, fires[e]) for e in mine]
            data = dict(base)
            data.update({"kind": "forcing", "factor": label, "edges": [_edge_key(e, label) for e in mine]})
            steps.append(ProofStep(case, data, RuleId.Lemma5))
            return steps, None
        allowed[label] = ok
        assignment[label] = _edge_key(ok[0], label)

    hit = _collision(shape, allowed)
    if hit:
        quads, partner, target = hit
        data = dict(base)
        data.update({"kind": "collision", "quadratics": quads, "partner": partner, "target": target})
        known = _ASSERTED_COLLISIONS.get((shape.layers[0], shape.layers[1:]))
        pdeg = dict(shape.labelled(0))[partner]
        tdeg = dict(x for ly in range(1, len(shape.layers)) for x in shape.labelled(ly))[target]
        if known and known[:2] == (pdeg, tdeg):
            steps = [ProofStep(case, data, RuleId.QuadraticCollision)]
            steps.append(ProofStep(case, dict(data, kind="asserted_case"), known[2]))
            return steps, None
        assignment["collision"] = {"quadratics": quads, "partner": partner, "target": target}
    return [], assignment


def screen_type(t: TypeSignature | Sequence[int], no_abelian_factor: bool = True) -> Verdict:
    if not isinstance(t, TypeSignature):
        t = TypeSignature(tuple(t))
    if t.steps > 3:
        raise ValueError(f"unsupported step count {t.steps}: at most 3 layers are screened")
    if not t.feasible:
        raise ValueError(f"type {t} violates the signature constraints")
    steps: list[ProofStep] = []
    survivors = []
    for shape in enumerate_shapes(t):
        s, assignment = _screen_shape(t, shape, no_abelian_factor)
        if assignment is None:
            steps.extend(s)
        else:
            survivors.append((shape, assignment))
    trace = ProofTrace(t, no_abelian_factor, tuple(steps))
    if survivors:
        return SurvivesScreen(tuple(survivors), trace)
    return Infeasible(trace)


def _screen_args(args):
    return screen_type(*args)


def sweep(dim: int, steps: int, no_abelian_factor: bool = True, *, guard: int = DIM_GUARD,
          override: bool = False, parallel: bool = False) -> list[tuple[TypeSignature, Verdict]]:
    if dim > guard and not override:
        raise ValueError(f"dimension {dim} exceeds the guard {guard}; pass override=True")
    types = enumerate_types(dim, steps)
    if parallel and len(types) > 1:
        with ProcessPoolExecutor() as ex:
            verdicts = list(ex.map(_screen_args, [(t, no_abelian_factor) for t in types]))
    else:
        verdicts = [screen_type(t, no_abelian_factor) for t in types]
    return sorted(zip(types, verdicts), key=lambda tv: tv[0].parts, reverse=True)


def reduce_by_abelian_factor(dim: int) -> list[tuple[int, int]]:
    """Splits ``dim = m + a`` with an abelian factor of dimension ``a >= 2``.

    The core ``m`` is either 0 or at least 6, the smallest dimension of a
    non-abelian Anosov Lie algebra.
    """
    if dim < 2:
        raise ValueError("dim must be at least 2")
    return [(dim - a, a) for a in range(dim, 1, -1) if dim - a == 0 or dim - a >= 6]


# ---------------------------------------------------------------------------
# trace replay

def _shape_of(data) -> FactorShape:
    return FactorShape.from_json(data["shape"])


def _degrees(shape: FactorShape) -> dict[str, int]:
    return {lab: d for ly in range(len(shape.layers)) for lab, d in shape.labelled(ly)}


def check_step(step: ProofStep) -> bool:
    """Re-evaluate a step's rule on the step's own data."""
    d = step.data
    kind = d.get("kind")
    shape = _shape_of(d)
    deg = _degrees(shape)
    if kind == "triple":
        left, right = d["pair"]
        triple = (deg[left], deg[right], deg[d["target"]])
        if list(triple) != d["triple"] or d["same_factor"] != (left == right):
            return False
        if tuple(d["orientation"]) not in orientations(triple):
            return False
        return refire(step.rule, d["orientation"], d["same_factor"])
    edges = _edges(shape)
    if kind == "forcing":
        mine = _f_edges(edges, d["factor"])
        if step.rule != RuleId.Lemma5 or [_edge_key(e, d["factor"]) for e in mine] != d["edges"]:
            return False
        return all(_firing(e) is not None for e in mine)
    if kind in ("collision", "asserted_case"):
        allowed = {lab: [e for e in _f_edges(edges, lab) if _firing(e) is None] for lab, _ in shape.labelled(0)}
        hit = _collision(shape, allowed)
        if hit is None or [hit[0], hit[1], hit[2]] != [d["quadratics"], d["partner"], d["target"]]:
            return False
        if kind == "collision":
            return step.rule == RuleId.QuadraticCollision
        known = _ASSERTED_COLLISIONS.get((shape.layers[0], shape.layers[1:]))
        return known is not None and known[2] == step.rule \
            and known[:2] == (deg[d["partner"]], deg[d["target"]])
    return False


def replay_trace(trace: ProofTrace) -> bool:
    """Every step re-fires and a fresh screen reproduces the trace byte for byte."""
    if not all(check_step(s) for s in trace.steps):
        return False
    fresh = screen_type(trace.type, trace.no_abelian_factor).trace
    return fresh.canonical() == trace.canonical()


def replay_steps(steps_json: Sequence[dict]) -> bool:
    """Replay a flat list of serialized steps, as emitted in JSON reports."""
    groups: dict[tuple, list[ProofStep]] = {}
    for s in steps_json:
        step = ProofStep.from_json(s)
        if s.get("citation") != step.citation:
            return False
        key = (tuple(step.data["type"]), step.data["no_abelian_factor"])
        groups.setdefault(key, []).append(step)
    for (parts, naf), steps in groups.items():
        if not replay_trace(ProofTrace(TypeSignature(parts), naf, tuple(steps))):
            return False
    return True


# ---------------------------------------------------------------------------
# splitting odd-dimensional generator layers

@dataclass(frozen=True)
class SplitResult:
    alpha: tuple[int, int]
    mu: AlgebraicUnit
    roots: tuple[tuple[int, int], ...]
    relations: tuple[Optional[tuple[int, int]], ...]
    v1: tuple[int, ...]
    v2: tuple[int, ...]
    certificate: tuple[dict[str, Any], ...]

    def to_json(self) -> dict[str, Any]:
        return {
            "alpha": list(self.alpha),
            "mu": {"minpoly": str(self.mu.minpoly), "index": self.mu.index},
            "roots": [list(r) for r in self.roots],
            "relations": [list(r) if r else None for r in self.relations],
            "V1": list(self.v1),
            "V2": list(self.v2),
            "certificate": list(self.certificate),
        }


def _in_s(rel: Optional[tuple[int, int]]) -> bool:
    # members of {mu^(2n) alpha, mu^(2n+1) alpha^-1}
    if rel is None:
        return False
    j, s = rel
    return (j % 2 == 0 and s == 1) or (j % 2 == 1 and s == -1)


def split_type_n2(f_factors: Sequence[IntPoly], g: IntPoly, K: int = DEFAULT_K) -> SplitResult:
    """Partition the roots of ``f`` into ``V1`` (the set S) and ``V2``.

    Roots are numbered globally: factor by factor in the given order, and
    within a factor by canonical root index.
    """
    if not f_factors:
        raise ValueError("need at least one generator factor")
    for h in f_factors:
        if not (is_unit_poly(h) and is_irreducible(h) and h.degree >= 1 and is_hyperbolic(h)):
            raise ValueError(f"generator factor {h} must be an irreducible hyperbolic unit polynomial")
    if sum(h.degree for h in f_factors) % 2 == 0:
        raise ValueError("the generator layer must have odd dimension")
    if not (g.degree == 2 and is_unit_poly(g) and is_irreducible(g) and is_hyperbolic(g)):
        raise ValueError(f"{g} must be an irreducible hyperbolic quadratic unit polynomial")
    odd = [i for i, h in enumerate(f_factors) if h.degree % 2 == 1]
    if not odd:
        raise ValueError("no odd-degree generator factor")

    units = [(i, j, make_unit(h, j)) for i, h in enumerate(f_factors) for j in range(h.degree)]
    fi = odd[0]
    alpha_u = next(u for i, j, u in units if i == fi and u.is_real)
    alpha = (fi, alpha_u.index)
    mu = make_unit(g, 1)

    rels = tuple(find_power_relation(u, alpha_u, mu, K) for _, _, u in units)
    v1 = tuple(k for k, r in enumerate(rels) if _in_s(r))
    v2 = tuple(k for k, r in enumerate(rels) if not _in_s(r))
    if not v1 or not v2:
        raise CertificationError("split produced an empty part")

    targets = (mu, inverse_unit(mu))
    cert = []
    for a in v1:
        for b in v2:
            ua, ub = units[a][2], units[b][2]
            z = ua.ball(128) * ub.ball(128)
            if not any(z.overlaps(t.ball(128)) for t in targets):
                cert.append({"pair": [a, b], "method": "separated"})
                continue
            prod = product_unit(ua, ub)
            if prod in targets:
                raise CertificationError(f"roots {a} and {b} multiply to mu^(+-1)")
            cert.append({"pair": [a, b], "method": "exact", "product": str(prod.minpoly)})
    return SplitResult(alpha, mu, tuple((i, j) for i, j, _ in units), rels, v1, v2, tuple(cert))
