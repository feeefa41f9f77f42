"""Lie algebra data, validation and the Kirillov Poisson bracket.

Structure constants are 1-based: ``c[(i, j)][k]`` is the coefficient of X_k in
[X_i, X_j].  A :class:`LieAlgebra` built through :func:`load_algebra` or
:func:`catalog` has passed every exact check (antisymmetry, Jacobi, centrality
of the supplied invariants); the unchecked constructor exists so corrupted
tables can be inspected with :func:`jacobi_report`.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
import os
import re

import yaml

from .coeff import Poly, as_rational
from .errors import ParseError, UsageError, ValidationError
from .expr import parse_expr
from .linalg import SparseSystem

CATALOG = ("heisenberg", "su2", "su3")

_REGULARITY = {
    "positive": lambda c0: all(c > 0 for c in c0),
    "nonzero": lambda c0: all(c != 0 for c in c0),
}


@dataclass(frozen=True)
class OrbitConstant:
    values: tuple
    regular: bool
    point: tuple = None


@dataclass(frozen=True)
class Violation:
    identity: str
    indices: tuple
    value: object

    def __str__(self):
        idx = ",".join(str(i) for i in self.indices)
        return f"{self.identity}({idx}) = {self.value}"


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    name: str
    n: int
    brackets: dict
    invariants: tuple = ()
    orbit_constants: tuple = ()
    aliases: tuple = None
    regularity: str = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def m(self):
        return len(self.invariants)

    def c(self, i, j, k):
        return self.brackets.get((i, j), {}).get(k, 0)

    @property
    def nonzero_constants(self):
        """List of ``(i, j, k, c_ij^k)`` with c nonzero, cached."""
        out = self._cache.get("nz")
        if out is None:
            out = sorted((i, j, k, v) for (i, j), row in self.brackets.items()
                         for k, v in row.items() if v)
            self._cache["nz"] = out
        return out

    def var(self, i):
        return Poly.var(self.n, i)

    def parse(self, text):
        return parse_expr(text, self.n, self.aliases)

    def format(self, f):
        return f.to_str(list(self.aliases) if self.aliases else None)

    def is_regular(self, c0):
        """Regularity of the orbit constant vector ``c0`` (None if unknown)."""
        c0 = tuple(as_rational(c) for c in c0)
        if self.regularity in _REGULARITY:
            return _REGULARITY[self.regularity](c0)
        for oc in self.orbit_constants:
            if oc.values == c0:
                return oc.regular
        return None

    def regular_constants(self):
        return [oc.values for oc in self.orbit_constants if oc.regular]

    def __hash__(self):
        return id(self)

    def __repr__(self):
        return f"LieAlgebra({self.name!r}, n={self.n}, m={self.m})"


def poisson_bracket(f, g, A):
    """Kirillov bracket sum_{ijk} c_ij^k x_k d_i f d_j g."""
    if f.n != A.n or g.n != A.n:
        raise UsageError(f"expected polynomials in {A.n} variables")
    df = {}
    dg = {}
    out = Poly.zero(A.n)
    for i, j, k, c in A.nonzero_constants:
        if i not in df:
            df[i] = f.partial(i)
        if j not in dg:
            dg[j] = g.partial(j)
        if df[i] and dg[j]:
            out = out + (df[i] * dg[j] * Poly.var(A.n, k)).scale(c)
    return out


def jacobi_report(A):
    """Every violated identity: antisymmetry (i,j,k), Jacobi (i,j,k,m) and
    centrality (invariant index, j).  Empty iff the algebra is valid."""
    n = A.n
    out = []
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            for k in range(1, n + 1):
                s = A.c(i, j, k) + A.c(j, i, k)
                if s:
                    out.append(Violation("antisymmetry", (i, j, k), s))
    # Jacobi: sum_l c_ij^l c_lk^m + c_jk^l c_li^m + c_ki^l c_lj^m
    rng = range(1, n + 1)
    for i in rng:
        for j in rng:
            for k in rng:
                acc = {}
                for (a, b, cc) in ((i, j, k), (j, k, i), (k, i, j)):
                    for l, v in A.brackets.get((a, b), {}).items():
                        if v:
                            for mm, w in A.brackets.get((l, cc), {}).items():
                                acc[mm] = acc.get(mm, 0) + v * w
                for mm, v in sorted(acc.items()):
                    if v:
                        out.append(Violation("jacobi", (i, j, k, mm), v))
    for a, p in enumerate(A.invariants, start=1):
        for j in rng:
            b = poisson_bracket(p, Poly.var(n, j), A)
            if b:
                out.append(Violation("centrality", (a, j), b.to_str()))
    return out


def _kirillov_rank(A, point):
    system = SparseSystem()
    rows = []
    for i in range(1, A.n + 1):
        row = {}
        for j in range(1, A.n + 1):
            v = sum(c * point[k - 1] for k, c in A.brackets.get((i, j), {}).items())
            if v:
                row[j] = v
        rows.append(row)
    for r in rows:
        try:
            system.add(r, 0)
        except Exception:  # homogeneous: cannot be inconsistent
            pass
    return system.rank


def validate(A):
    """Raise :class:`ValidationError` naming the first violated identity."""
    report = jacobi_report(A)
    if report:
        first = report[0]
        raise ValidationError(first.identity, f"{first} ({len(report)} violation(s) in total)")
    for oc in A.orbit_constants:
        if len(oc.values) != A.m:
            raise ValidationError("orbit-constants", f"{oc.values} has length != {A.m}")
        if oc.point is not None:
            pt = {i + 1: v for i, v in enumerate(oc.point)}
            for a, p in enumerate(A.invariants):
                val = p.substitute(pt).coeff((0,) * A.n)
                if val != oc.values[a]:
                    raise ValidationError("orbit-constants",
                                          f"p{a + 1}{oc.point} = {val}, expected {oc.values[a]}")
            regular = _kirillov_rank(A, oc.point) == A.n - A.m
            if regular != oc.regular:
                raise ValidationError("regularity",
                                      f"point {oc.point} has regular={regular}, catalog says {oc.regular}")
        pred = _REGULARITY.get(A.regularity)
        if pred is not None and pred(oc.values) != oc.regular:
            raise ValidationError("regularity", f"predicate {A.regularity!r} disagrees on {oc.values}")
    return A


_BRACKET = re.compile(r"^\s*(\d+)\s+(\d+)\s*->\s*(\d+)\s+(\S+)\s*$")


def _parse_brackets(entries, n):
    explicit = {}
    for pos, entry in enumerate(entries):
        m = _BRACKET.match(str(entry))
        if not m:
            raise ParseError(f"malformed bracket entry {entry!r}, expected 'i j -> k coeff'",
                             location=f"brackets[{pos}]")
        i, j, k = (int(m.group(g)) for g in (1, 2, 3))
        for idx in (i, j, k):
            if not 1 <= idx <= n:
                raise ParseError(f"index {idx} out of range 1..{n}", location=f"brackets[{pos}]")
        try:
            coeff = as_rational(m.group(4))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"bad coefficient {m.group(4)!r}", location=f"brackets[{pos}]")
        row = explicit.setdefault((i, j), {})
        row[k] = row.get(k, 0) + coeff
    table = {key: dict(row) for key, row in explicit.items()}
    for (i, j), row in explicit.items():
        if (j, i) not in explicit:
            table[(j, i)] = {k: -v for k, v in row.items()}
    return table


def build_algebra(doc, check=True):
    """Construct a :class:`LieAlgebra` from a parsed description mapping."""
    if not isinstance(doc, dict):
        raise ParseError("algebra description must be a mapping")
    for key in ("name", "dim", "brackets"):
        if key not in doc:
            raise ParseError(f"missing key {key!r}")
    n = doc["dim"]
    if not isinstance(n, int) or n < 1:
        raise ParseError(f"dim must be a positive integer, got {n!r}", location="dim")
    aliases = doc.get("aliases")
    if aliases is not None:
        aliases = tuple(str(a) for a in aliases)
        if len(aliases) != n:
            raise ParseError(f"need {n} aliases", location="aliases")
    brackets = _parse_brackets(doc.get("brackets") or [], n)
    invariants = []
    for pos, text in enumerate(doc.get("invariants") or []):
        try:
            invariants.append(parse_expr(str(text), n, aliases))
        except ParseError as exc:
            raise ParseError(f"invariants[{pos}]: {exc.message}", exc.offset)
    consts = []
    for pos, entry in enumerate(doc.get("orbit_constants") or []):
        if not isinstance(entry, dict) or "values" not in entry:
            raise ParseError("orbit constant needs 'values'", location=f"orbit_constants[{pos}]")
        reg = entry.get("regular", True)
        if isinstance(reg, str):
            reg = reg.strip().lower() in ("yes", "true")
        point = entry.get("point")
        consts.append(OrbitConstant(
            tuple(as_rational(str(v)) for v in entry["values"]), bool(reg),
            None if point is None else tuple(as_rational(str(v)) for v in point)))
    A = LieAlgebra(str(doc["name"]), n, brackets, tuple(invariants), tuple(consts),
                   aliases, doc.get("regularity"))
    return validate(A) if check else A


def load_algebra(source, check=True):
    """Load an algebra from a catalog name, a file path, or YAML text."""
    if isinstance(source, dict):
        return build_algebra(source, check)
    if source in CATALOG:
        return catalog(source) if check else build_algebra(_read_catalog_doc(source), False)
    text = source
    if os.path.exists(source):
        with open(source) as fh:
            text = fh.read()
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        loc = f"line {mark.line + 1}, column {mark.column + 1}" if mark else None
        raise ParseError(f"YAML syntax error: {getattr(exc, 'problem', exc)}", location=loc)
    return build_algebra(doc, check)


def _read_catalog_doc(name):
    text = resources.files("orbitstar.data").joinpath(f"{name}.yaml").read_text()
    return yaml.safe_load(text)


@lru_cache(maxsize=None)
def catalog(name):
    """Validated built-in algebra (``heisenberg``, ``su2`` or ``su3``)."""
    if name not in CATALOG:
        raise UsageError(f"unknown catalog algebra {name!r}; choose from {', '.join(CATALOG)}")
    return build_algebra(_read_catalog_doc(name))


def unchecked(name, n, brackets, invariants=(), aliases=None):
    """LieAlgebra without validation (for inspecting corrupted data)."""
    table = {key: {k: as_rational(v) for k, v in row.items()} for key, row in brackets.items()}
    return LieAlgebra(name, n, table, tuple(invariants), (), aliases)


def with_constants(A, brackets=None, invariants=None, name=None):
    """Copy of ``A`` with replaced tables, not validated."""
    return LieAlgebra(name or A.name, A.n, brackets if brackets is not None else A.brackets,
                      tuple(invariants) if invariants is not None else A.invariants,
                      A.orbit_constants, A.aliases, A.regularity)


def abelian(n):
    return LieAlgebra(f"abelian{n}", n, {}, (), (), None)


def structure_constant_table(A):
    """Dense nested list c[i-1][j-1][k-1] (Fractions), for inspection."""
    return [[[Fraction(A.c(i, j, k)) for k in range(1, A.n + 1)]
             for j in range(1, A.n + 1)] for i in range(1, A.n + 1)]
