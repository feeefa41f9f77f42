"""Command-line front end: ``orbitstar <command> ...``.

Reports are plain text, one ``PROPERTY<TAB>STATUS<TAB>WITNESS`` line per
property, preceded by ``#`` comment lines (always including the seed for
randomized commands).  Exit status: 0 all properties hold, 1 some property
failed, 2 usage or parse error.
"""

import argparse
import os
import random
import sys

from .algstar import (QuantizationData, StarProduct, equivalence_solver, eta,
                      star_p, star_s_handle, tangentiality_check)
from .coeff import Poly, as_rational
from .errors import OrbitStarError, ParseError, UsageError, ValidationError
from .expr import parse_expr
from .kontsevich import from_lie, random_poly, star_k2
from .lie import load_algebra, poisson_bracket
from .orbit import normal_form, orbit_ideal

PRODUCTS = ("S", "P", "K2")
PROPERTIES = ("assoc", "tangential", "equivalence", "eta-generators", "first-order")
GLUE_CHECKS = ("cocycle", "consistency", "assoc", "tangential", "continuity",
               "partition", "chart-choice")


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def _default_seed():
    raw = os.environ.get("ORBITSTAR_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"ORBITSTAR_SEED must be an integer, got {raw!r}")


def build_parser():
    p = _Parser(prog="orbitstar", description="Star products on duals of Lie algebras and their orbits.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check-algebra", help="validate a catalog algebra or a YAML description")
    c.add_argument("algebra")

    def algebra_args(q, products=True):
        q.add_argument("--algebra", required=True, help="catalog name or YAML file")
        q.add_argument("--c0", help="orbit constants, comma separated (e.g. 1 or 7/3,10/9)")
        if products:
            q.add_argument("--product", choices=PRODUCTS, default="S")
            q.add_argument("--ch", help="deformed constants c(h), comma separated (e.g. 1+h)")

    s = sub.add_parser("star-mul", help="multiply two polynomials")
    algebra_args(s)
    s.add_argument("f")
    s.add_argument("g")

    o = sub.add_parser("orbit-reduce", help="normal form modulo the orbit ideal")
    algebra_args(o, products=False)
    o.add_argument("f")

    v = sub.add_parser("verify", help="run a randomized property check")
    v.add_argument("--property", required=True, choices=PROPERTIES)
    algebra_args(v)
    v.add_argument("--degree", type=int, default=3)
    v.add_argument("--order", type=int, default=2)
    v.add_argument("--seed", type=int)
    v.add_argument("--cases", type=int, default=20)

    g = sub.add_parser("glue-verify", help="numerical checks on a chart-cover fixture")
    g.add_argument("--fixture", required=True, help="fixture name or JSON file")
    g.add_argument("--check", required=True, choices=GLUE_CHECKS)
    g.add_argument("--points", type=int, default=20)
    g.add_argument("--seed", type=int)
    return p


# ---- helpers ------------------------------------------------------------------------

def _c0(A, text):
    if text is None:
        regs = A.regular_constants()
        if not regs:
            raise UsageError(f"{A.name}: no regular orbit constant on record; pass --c0")
        return list(regs[0])
    try:
        vals = [as_rational(t.strip()) for t in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"bad --c0 value {text!r}")
    if len(vals) != A.m:
        raise UsageError(f"{A.name} has {A.m} invariant(s); --c0 gave {len(vals)} value(s)")
    return vals


def _ch(A, text):
    if text is None:
        return None
    parts = [t.strip() for t in text.split(",")]
    if len(parts) != A.m:
        raise UsageError(f"{A.name} has {A.m} invariant(s); --ch gave {len(parts)} value(s)")
    return [parse_expr(t, A.n, A.aliases) for t in parts]


def _product(A, args):
    """(StarProduct, truncation order or None, QuantizationData or None)."""
    if args.product == "S":
        return star_s_handle(A), None, None
    if args.product == "K2":
        P = from_lie(A)
        return StarProduct("K2", A.n, lambda f, g: star_k2(f, g, P)), 2, None
    if A.m == 0:
        raise UsageError(f"{A.name} has no invariants; product P needs an orbit")
    Q = QuantizationData.build(A, _c0(A, args.c0), _ch(A, args.ch))
    return StarProduct("P", A.n, lambda f, g: star_p(f, g, Q)), None, Q


def _trunc(f, top):
    return f if top is None else f.truncate_h(top)


def _line(out, prop, ok, witness):
    out.append(f"{prop}\t{'PASS' if ok else 'FAIL'}\t{witness}")
    return ok


# ---- commands -----------------------------------------------------------------------

def cmd_check_algebra(args, out):
    try:
        A = load_algebra(args.algebra)
    except ValidationError as exc:
        _line(out, "algebra", False, str(exc))
        return 1
    out.append(f"# {A.name}: n={A.n}, m={A.m}")
    _line(out, "algebra", True, "antisymmetry, Jacobi and centrality hold")
    return 0


def cmd_star_mul(args, out):
    A = load_algebra(args.algebra)
    star, top, _ = _product(A, args)
    f, g = A.parse(args.f), A.parse(args.g)
    out.append(A.format(_trunc(star(f, g), top)))
    return 0


def cmd_orbit_reduce(args, out):
    A = load_algebra(args.algebra)
    if A.m == 0:
        raise UsageError(f"{A.name} has no invariants")
    I = orbit_ideal(A, _c0(A, args.c0))
    out.append(A.format(normal_form(A.parse(args.f), I)))
    return 0


def _random_polys(rng, A, degree, k):
    return [random_poly(rng, A.n, max_deg=degree) for _ in range(k)]


def cmd_verify(args, out):
    seed = _default_seed() if args.seed is None else args.seed
    out.append(f"# seed={seed}")
    A = load_algebra(args.algebra)
    star, top, Q = _product(A, args)
    out.append(f"# algebra={A.name} product={star.name} property={args.property}")
    rng = random.Random(seed)
    fmt = A.format
    prop = args.property

    if prop == "assoc":
        for case in range(args.cases):
            f, g, k = _random_polys(rng, A, args.degree, 3)
            lhs = _trunc(star(_trunc(star(f, g), top), k), top)
            rhs = _trunc(star(f, _trunc(star(g, k), top)), top)
            if lhs != rhs:
                _line(out, prop, False, f"case {case}: f={fmt(f)}; g={fmt(g)}; k={fmt(k)}; "
                                        f"defect {fmt(lhs - rhs)}")
                return 1
        _line(out, prop, True, f"{args.cases} triples, degree <= {args.degree}")
        return 0

    if prop == "first-order":
        for case in range(args.cases):
            f, g = _random_polys(rng, A, args.degree, 2)
            fg, gf = star(f, g), star(g, f)
            zeroth = fg.h_part(0) - f * g
            first = (fg - gf).truncate_h(1) - poisson_bracket(f, g, A).shift_h(1)
            if zeroth or first:
                bad = zeroth if zeroth else first
                _line(out, prop, False, f"case {case}: f={fmt(f)}; g={fmt(g)}; defect {fmt(bad)}")
                return 1
        _line(out, prop, True, f"{args.cases} pairs, degree <= {args.degree}")
        return 0

    if prop == "tangential":
        if A.m == 0:
            raise UsageError(f"{A.name} has no invariants")
        I = Q.ideal if Q is not None else orbit_ideal(A, _c0(A, args.c0))
        wrapped = StarProduct(star.name, A.n, lambda f, g: _trunc(star(f, g), top))
        rep = tangentiality_check(wrapped, I)
        if rep.passed:
            _line(out, prop, True, rep.describe(fmt))
            return 0
        _line(out, prop, False, fmt(rep.witness[3]))
        out.append(f"# {rep.describe(fmt)}")
        return 1

    if prop == "equivalence":
        order = args.order
        target = star_s_handle(A)
        res = equivalence_solver(star, target, A.n, args.degree, order)
        label = f"{star.name} ~ S, degree {args.degree}, order {order}"
        if res.success:
            _line(out, prop, True, f"{label}: residual 0")
            return 0
        _line(out, prop, False, f"{label}: {res.message}")
        return 1

    if prop == "eta-generators":
        if Q is None:
            raise UsageError("eta-generators needs --product P")
        ok = True
        for i, (p, c) in enumerate(zip(A.invariants, Q.c_h), start=1):
            c0 = Poly.one(A.n).scale(Q.ideal.c0[i - 1])
            got = eta(p - c0, Q)
            want = p - Poly.from_hpoly(A.n, c)
            good = got == want
            ok &= _line(out, f"{prop}[{i}]", good,
                        f"eta(p{i} - c{i}) = {fmt(got)}" + ("" if good else f", expected {fmt(want)}"))
        return 0 if ok else 1
    raise UsageError(f"unknown property {prop}")


def cmd_glue_verify(args, out):
    from .glue import checks
    from .glue.fixtures import load_fixture_doc, cover_from_dict
    seed = _default_seed() if args.seed is None else args.seed
    out.append(f"# seed={seed}")
    doc = load_fixture_doc(args.fixture)
    cover = cover_from_dict(doc)
    out.append(f"# fixture={cover.name} charts={len(cover.charts)} n={cover.n} H={cover.H} K={cover.K}")
    if args.check == "tangential":
        if "leaf" not in doc:
            raise UsageError(f"fixture {cover.name} has no leaf description")
        rep = checks.tangentiality_probe(cover, doc["leaf"], args.points, seed)
    else:
        rep = checks.CHECKS[args.check](cover, args.points, seed)
    out.append(rep.table())
    out.append(rep.line())
    return 0 if rep.passed else 1


COMMANDS = {
    "check-algebra": cmd_check_algebra,
    "star-mul": cmd_star_mul,
    "orbit-reduce": cmd_orbit_reduce,
    "verify": cmd_verify,
    "glue-verify": cmd_glue_verify,
}


def run_command(argv):
    """Run one command; returns (exit code, report text, error text)."""
    out = []
    try:
        args = build_parser().parse_args(argv)
        code = COMMANDS[args.command](args, out)
        return code, "\n".join(out), ""
    except _Usage as exc:
        return 2, "\n".join(out), f"usage error: {exc}"
    except ParseError as exc:
        return 2, "\n".join(out), f"parse error: {exc}"
    except (UsageError, OrbitStarError) as exc:
        return 2, "\n".join(out), f"error: {exc}"


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if argv and argv[0] in ("-h", "--help"):
        build_parser().print_help()
        return 0
    code, text, err = run_command(argv)
    if text:
        print(text)
    if err:
        print(err, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
