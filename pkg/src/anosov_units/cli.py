"""Command-line front end.

Exit codes: 0 success, 1 input error, 2 certification failure or a
counterexample to one of the unit lemmas.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from typing import Any, Sequence

from . import __version__
from .errors import CertificationError, LemmaViolation, PolyParseError
from .lemmas import LEMMA_NAMES, RuleId, lemma6_check, sample_unit_pairs, unit_pool, verify_all
from .liealg import (
    basis_components,
    build_type94,
    eigen_compat,
    has_abelian_factor,
    type_of,
)
from .obstruction import (
    DIM_GUARD,
    TypeSignature,
    reduce_by_abelian_factor,
    screen_type,
    split_type_n2,
    sweep,
)
from .polyint import (
    IntPoly,
    factor_int_poly,
    is_irreducible,
    is_root_of_unity_poly,
    is_unit_poly,
    parse_poly,
    product_poly,
)
from .roots import is_hyperbolic, isolate_roots, modulus_margin
from .units import conjugates, inverse_unit, make_unit, product_unit

EXIT_OK, EXIT_INPUT, EXIT_CERT = 0, 1, 2


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _report(command: str, inputs: dict, results: Any, traces: list | None = None) -> dict:
    return {"command": command, "version": __version__, "inputs": inputs,
            "results": results, "traces": traces or []}


def _poly(text: str) -> IntPoly:
    try:
        return parse_poly(text)
    except PolyParseError as e:
        raise InputError(f"cannot parse polynomial {text!r}: {e}") from None


# ---------------------------------------------------------------------------
# commands; each returns (report, human-readable lines, exit code)

def _verdict_row(t: TypeSignature, v) -> dict:
    return {
        "type": list(t.parts),
        "verdict": type(v).__name__,
        "survivors": [{"shape": s.to_json(), "assignment": a} for s, a in v.survivors],
        "rules": sorted(r.value for r in v.trace.rules()),
    }


def _verdict_lines(t, v) -> list[str]:
    rules = ", ".join(sorted(r.value for r in v.trace.rules())) or "none"
    lines = [f"Case {t}: {type(v).__name__} (rules: {rules})"]
    for s, _ in v.survivors:
        lines.append(f"  survives: {s}")
    return lines


def cmd_analyze(args):
    if args.dim < 2 or args.steps < 1:
        raise InputError("--dim must be >= 2 and --steps >= 1")
    if args.steps > 3:
        raise InputError("at most 3 steps are supported")
    try:
        rows = sweep(args.dim, args.steps, args.no_abelian_factor,
                     override=args.override_guard, parallel=args.parallel)
    except ValueError as e:
        raise InputError(str(e)) from None
    surviving = [list(t.parts) for t, v in rows if v.feasible]
    splits = reduce_by_abelian_factor(args.dim)
    results = {
        "types": [_verdict_row(t, v) for t, v in rows],
        "surviving_types": surviving,
        "abelian_splits": [list(s) for s in splits],
    }
    lines = [line for t, v in rows for line in _verdict_lines(t, v)]
    if not rows:
        lines.append("no feasible types")
    if args.no_abelian_factor:
        if surviving:
            conclusion = "survivors remain"
        elif all(m == 0 for m, _ in splits):
            conclusion = "abelian only"
        else:
            conclusion = "abelian factor required"
        results["conclusion"] = conclusion
        lines.append(f"conclusion ({args.steps}-step types): {conclusion}")
    traces = [s for _, v in rows for s in v.trace.to_json()]
    inputs = {"dim": args.dim, "steps": args.steps, "no_abelian_factor": args.no_abelian_factor}
    return _report("analyze", inputs, results, traces), lines, EXIT_OK


def cmd_analyze_type(args):
    try:
        parts = tuple(int(p) for p in args.type.strip("()").split(","))
        v = screen_type(TypeSignature(parts), args.no_abelian_factor)
    except ValueError as e:
        raise InputError(str(e)) from None
    inputs = {"type": list(parts), "no_abelian_factor": args.no_abelian_factor}
    t = TypeSignature(parts)
    return _report("analyze-type", inputs, _verdict_row(t, v), v.trace.to_json()), _verdict_lines(t, v), EXIT_OK


def _box_json(b) -> dict:
    z = b.as_complex()
    return {"index": b.index, "re": repr(z.real), "im": repr(z.imag), "radius": repr(b.radius_float)}


def cmd_check_poly(args):
    f = _poly(args.poly)
    if f.is_zero():
        raise InputError("zero polynomial")
    unit = is_unit_poly(f)
    res: dict[str, Any] = {"poly": str(f), "degree": f.degree, "unit": unit}
    if f[0] != 0:
        res["hyperbolic"] = is_hyperbolic(f)
        res["root_of_unity"] = is_root_of_unity_poly(f) if f.is_monic() else False
    else:
        res["hyperbolic"] = None
        res["root_of_unity"] = False
    if res["hyperbolic"]:
        res["modulus_margin"] = repr(modulus_margin(f))
    res["factorization"] = [{"factor": str(q), "multiplicity": e} for q, e in factor_int_poly(f)]
    res["roots"] = [_box_json(b) for b in isolate_roots(f)] if f.degree > 0 else []
    yn = {True: "yes", False: "no", None: "n/a"}
    lines = [f"polynomial: {f}", f"unit: {yn[unit]}", f"hyperbolic: {yn[res['hyperbolic']]}",
             f"root of unity: {yn[res['root_of_unity']]}",
             "factorization: " + " * ".join(f"({q})" + (f"^{e}" if e > 1 else "") for q, e in factor_int_poly(f))]
    for r in res["roots"]:
        im = float(r["im"])
        sign = "-" if im < 0 else "+"
        lines.append(f"  root {r['index']}: {r['re']} {sign} {abs(im)!r}i  (radius {r['radius']})")
    return _report("check-poly", {"poly": args.poly}, res), lines, EXIT_OK


def cmd_minpoly_product(args):
    f, g = _poly(args.f), _poly(args.g)
    if not (f.is_monic() and g.is_monic()):
        raise InputError("both polynomials must be monic")
    P = product_poly(f, g)
    res: dict[str, Any] = {"product_poly": str(P),
                           "factorization": [{"factor": str(q), "multiplicity": e} for q, e in factor_int_poly(P)]}
    lines = [f"product polynomial: {P}"]
    if is_unit_poly(f) and is_unit_poly(g) and is_irreducible(f) and is_irreducible(g):
        try:
            u = make_unit(f, args.root_f)
            v = make_unit(g, args.root_g)
        except (IndexError, ValueError) as e:
            raise InputError(str(e)) from None
        w = product_unit(u, v)
        res["minpoly"] = str(w.minpoly)
        res["root"] = _box_json(w.root)
        lines.append(f"minimal polynomial of the product: {w.minpoly} (root {w.root.index})")
    inputs = {"f": args.f, "g": args.g, "root_f": args.root_f, "root_g": args.root_g}
    return _report("minpoly-product", inputs, res), lines, EXIT_OK


def _lemma6_samples(n: int, seed: int):
    rng = random.Random(seed)
    pool = unit_pool()
    cubics = [p for p in pool if p.degree == 3 and is_hyperbolic(p)]
    quads = [p for p in pool if p.degree == 2 and is_hyperbolic(p)]
    for _ in range(n):
        betas = conjugates(make_unit(rng.choice(cubics), 0))
        lam = make_unit(rng.choice(quads), rng.randrange(2))
        pick = rng.randrange(3)
        if pick == 0:
            mu = lam
        elif pick == 1:
            mu = inverse_unit(lam)
        else:
            mu = make_unit(rng.choice(quads), rng.randrange(2))
        yield betas, lam, mu


def cmd_verify_lemma(args):
    name = args.name.lower()
    if name not in LEMMA_NAMES:
        raise InputError(f"unknown lemma {args.name!r}; known: {', '.join(sorted(LEMMA_NAMES))}")
    if args.samples < 1:
        raise InputError("--samples must be positive")
    rule = LEMMA_NAMES[name]
    counts = {"pass": 0, "vacuous": 0, "counterexample": 0}
    examples = []
    if rule == RuleId.Lemma6:
        for betas, lam, mu in _lemma6_samples(args.samples, args.seed):
            try:
                counts["pass" if lemma6_check(betas, lam, mu) else "vacuous"] += 1
            except LemmaViolation as e:
                counts["counterexample"] += 1
                examples.append(str(e))
    else:
        for a, b in sample_unit_pairs(args.samples, args.seed):
            r = verify_all(a, b, [rule])[rule]
            counts[r.verdict] += 1
            if r.verdict == "counterexample":
                examples.append(f"{a} , {b}")
    res = {"rule": rule.value, "citation": rule.citation, "counts": counts, "counterexamples": examples}
    lines = [f"{rule.value}: {counts['pass']} pass, {counts['vacuous']} vacuous, "
             f"{counts['counterexample']} counterexamples"]
    code = EXIT_CERT if counts["counterexample"] else EXIT_OK
    inputs = {"name": name, "samples": args.samples, "seed": args.seed}
    return _report("verify-lemma", inputs, res), lines, code


def _params(text: str) -> list[Fraction]:
    try:
        vals = [Fraction(p.strip()) for p in text.split(",")]
    except ValueError:
        raise InputError(f"bad parameter list {text!r}") from None
    if len(vals) != 4 or any("." in p for p in text.split(",")):
        raise InputError("--params takes four rationals a,b,c,d")
    return vals


def cmd_build_example(args):
    params = _params(args.params)
    cubic, quad = _poly(args.cubic), _poly(args.quadratic)
    try:
        L, E = build_type94(*params, cubic=cubic, quadratic=quad)
    except ValueError as e:
        raise InputError(str(e)) from None
    w = has_abelian_factor(L)
    comps = basis_components(L)
    res = {
        "labels": list(L.labels),
        "brackets": [[i, j, k, str(c)] for i, j, k, c in L.nonzero_constants()],
        "type": list(type_of(L).parts),
        "abelian_factor": None if w is None else {"dim_a": len(w.a), "dim_m": len(w.m)},
        "eigen_compat": eigen_compat(L, E),
        "eigenvalues": [str(x) for x in E.words],
        "components": [[L.labels[i - 1] for i in c] for c in comps],
    }
    lines = [f"[{L.labels[i - 1]}, {L.labels[j - 1]}] += {c} {L.labels[k - 1]}" for i, j, k, c in L.nonzero_constants()]
    lines += [f"type: {type_of(L)}",
              "abelian factor: " + ("none" if w is None else f"yes (dim a = {len(w.a)})"),
              f"eigen-compatible: {'yes' if res['eigen_compat'] else 'no'}",
              f"basis components: {len(comps)}"]
    inputs = {"params": [str(p) for p in params], "cubic": str(cubic), "quadratic": str(quad)}
    return _report("build-example", inputs, res), lines, EXIT_OK


def cmd_split(args):
    texts = [t for item in args.f for t in item.split(";") if t.strip()]
    f = [_poly(t) for t in texts]
    g = _poly(args.g)
    try:
        r = split_type_n2(f, g, args.K)
    except ValueError as e:
        raise InputError(str(e)) from None
    lines = [f"alpha: root {r.alpha[1]} of factor {r.alpha[0]}",
             f"V1: {list(r.v1)}", f"V2: {list(r.v2)}",
             f"cross-products checked: {len(r.certificate)} (none equal mu or mu^-1)"]
    inputs = {"f": [str(p) for p in f], "g": str(g), "K": args.K}
    return _report("split", inputs, r.to_json()), lines, EXIT_OK


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="anosov-units", description="Algebraic-unit screens for Anosov Lie algebras")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="emit a JSON report")
        return sp

    a = common(sub.add_parser("analyze", help="screen every type of a dimension"))
    a.add_argument("--dim", type=int, required=True)
    a.add_argument("--steps", type=int, default=2)
    a.add_argument("--no-abelian-factor", action="store_true")
    a.add_argument("--parallel", action="store_true")
    a.add_argument("--override-guard", action="store_true", help=f"allow dim > {DIM_GUARD}")
    a.set_defaults(func=cmd_analyze)

    t = common(sub.add_parser("analyze-type", help="screen a single type"))
    t.add_argument("--type", required=True, help="e.g. 9,4")
    t.add_argument("--no-abelian-factor", action="store_true")
    t.set_defaults(func=cmd_analyze_type)

    c = common(sub.add_parser("check-poly", help="unit, hyperbolicity and torsion tests"))
    c.add_argument("poly")
    c.set_defaults(func=cmd_check_poly)

    m = common(sub.add_parser("minpoly-product", help="polynomial of pairwise root products"))
    m.add_argument("f")
    m.add_argument("g")
    m.add_argument("--root-f", type=int, default=0)
    m.add_argument("--root-g", type=int, default=0)
    m.set_defaults(func=cmd_minpoly_product)

    v = common(sub.add_parser("verify-lemma", help="test a unit lemma on sampled units"))
    v.add_argument("--name", required=True)
    v.add_argument("--samples", type=int, default=100)
    v.add_argument("--seed", type=int, default=0)
    v.set_defaults(func=cmd_verify_lemma)

    b = common(sub.add_parser("build-example", help="build the 13-dimensional family"))
    b.add_argument("--params", default="1,1,1,1")
    b.add_argument("--cubic", default="x^3-3x+1")
    b.add_argument("--quadratic", default="x^2-3x+1")
    b.set_defaults(func=cmd_build_example)

    s = common(sub.add_parser("split", help="split an odd generator layer over a quadratic"))
    s.add_argument("--f", action="append", required=True, help="generator factor (repeatable, or ';'-separated)")
    s.add_argument("--g", required=True)
    s.add_argument("--K", type=int, default=8)
    s.set_defaults(func=cmd_split)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:  # argparse: bad flags, --help, --version
        return e.code if isinstance(e.code, int) else EXIT_INPUT
    try:
        report, lines, code = args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except CertificationError as e:
        print(f"certification failure: {e}", file=sys.stderr)
        return EXIT_CERT
    if args.json:
        print(json.dumps(report, sort_keys=True, indent=2))
    else:
        print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
