"""Orbit ideals (p_i - c_i), Groebner reduction and the staircase basis B.

Internally polynomials are plain dicts ``{exponents: rational}`` without h;
the public functions accept and return :class:`Poly`.

Two Groebner bases are kept per ideal: one of the orbit ideal itself, used
for normal forms, and one of the top forms (p_1, ..., p_m).  Because the
invariants form a regular sequence, both have the same leading-term ideal
(checked at construction), so B is a basis for both quotients.  Division by
the homogeneous basis yields cofactors of bounded degree, which drive the
degree-by-degree peeling in :func:`ideal_witness` and in the division route
of :func:`kostant_decompose`.
"""

from fractions import Fraction
from itertools import combinations

from .coeff import Poly, as_rational, monomial_key
from .errors import InternalError, UsageError
from .linalg import Inconsistent, SparseSystem


# ---- dict polynomial helpers ----------------------------------------------

def _lm(p):
    return max(p, key=monomial_key)


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _mono_div(b, a):
    return tuple(y - x for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _add_into(acc, p, c=1, shift=None):
    """acc += c * x^shift * p (in place)."""
    for e, v in p.items():
        if shift is not None:
            e = tuple(x + y for x, y in zip(e, shift))
        nv = acc.get(e, 0) + c * v
        if nv:
            acc[e] = nv
        else:
            acc.pop(e, None)
    return acc


def _mul(p, q):
    out = {}
    for a, u in p.items():
        for b, v in q.items():
            e = tuple(x + y for x, y in zip(a, b))
            out[e] = out.get(e, 0) + u * v
    return {e: c for e, c in out.items() if c}


def _deg(e):
    return sum(e)


def _poly_to_dict(f):
    if not f.is_h_free():
        raise UsageError("expected a polynomial without h")
    return {e: c for (e, _), c in f.flat_items()}


def _dict_to_poly(n, p):
    return Poly._raw(n, {(e, 0): c for e, c in p.items() if c})


def _top_form(p):
    d = max(map(_deg, p))
    return {e: c for e, c in p.items() if _deg(e) == d}


class _Basis:
    """Groebner basis elements with cofactors over the original generators."""

    def __init__(self, n, polys, cofs, ngen=0):
        self.n = n
        self.ngen = ngen
        self.polys = polys
        self.cofs = cofs
        self.lms = [_lm(p) for p in polys]


def _reduce(f, basis, track=False, full=True):
    """Divide ``f`` by ``basis``; returns (remainder, cofactors per original
    generator) where f = sum cof_i gen_i + remainder."""
    f = dict(f)
    quot = [{} for _ in range(basis.ngen)] if track else None
    rem = {}
    while f:
        e = _lm(f)
        c = f[e]
        for g, lm, cof in zip(basis.polys, basis.lms, basis.cofs):
            if _divides(lm, e):
                s = _mono_div(e, lm)
                q = c / Fraction(g[lm])
                _add_into(f, g, -q, s)
                if track:
                    for i, ci in enumerate(cof):
                        if ci:
                            _add_into(quot[i], ci, q, s)
                break
        else:
            if not full:
                rem.update(f)
                break
            rem[e] = c
            del f[e]
    return rem, quot


def _buchberger(n, gens, track):
    ngen = len(gens)
    polys = []
    cofs = []
    for i, g in enumerate(gens):
        if g:
            polys.append(dict(g))
            cofs.append([({(0,) * n: 1} if j == i else {}) for j in range(ngen)] if track else [])
    basis = _Basis(n, polys, cofs, ngen)
    pairs = list(combinations(range(len(polys)), 2))
    while pairs:
        i, j = pairs.pop(0)
        a, b = basis.lms[i], basis.lms[j]
        lcm = _lcm(a, b)
        if lcm == tuple(x + y for x, y in zip(a, b)):
            continue  # coprime leading monomials
        gi, gj = basis.polys[i], basis.polys[j]
        ci, cj = Fraction(gi[a]), Fraction(gj[b])
        si, sj = _mono_div(lcm, a), _mono_div(lcm, b)
        s = _add_into(_add_into({}, gi, 1 / ci, si), gj, -1 / cj, sj)
        if not s:
            continue
        scof = None
        if track:
            scof = []
            for u, v in zip(basis.cofs[i], basis.cofs[j]):
                scof.append(_add_into(_add_into({}, u, 1 / ci, si), v, -1 / cj, sj))
        rem, quot = _reduce(s, basis, track)
        if not rem:
            continue
        if track:
            scof = [_add_into(x, q, -1) for x, q in zip(scof, quot)]
        k = len(basis.polys)
        basis.polys.append(rem)
        basis.cofs.append(scof if track else [])
        basis.lms.append(_lm(rem))
        pairs.extend((m, k) for m in range(k))
    return _interreduce(basis, track)


def _interreduce(basis, track):
    items = list(zip(basis.polys, basis.cofs, basis.lms))
    # drop elements whose leading monomial is divisible by another one
    keep = []
    for idx, (p, cof, lm) in enumerate(items):
        redundant = False
        for jdx, (_, _, lm2) in enumerate(items):
            if jdx != idx and _divides(lm2, lm) and (lm2 != lm or jdx < idx):
                redundant = True
                break
        if not redundant:
            keep.append((p, cof, lm))
    out_p, out_c = [], []
    for idx, (p, cof, lm) in enumerate(keep):
        others = [k for jdx, k in enumerate(keep) if jdx != idx]
        sub = _Basis(basis.n, [k[0] for k in others], [k[1] for k in others], basis.ngen)
        # reduce the tail only: the leading term is irreducible by the others
        lead = {lm: p[lm]}
        tail = {e: c for e, c in p.items() if e != lm}
        rem, quot = _reduce(tail, sub, track)
        inv = 1 / Fraction(p[lm])
        poly = {e: as_rational(c * inv) for e, c in _add_into(rem, lead).items()}
        out_p.append(poly)
        if track:
            out_c.append([{e: c * inv for e, c in _add_into(dict(ci), q, -1).items()}
                          for ci, q in zip(cof, quot)])
        else:
            out_c.append([])
    order = sorted(range(len(out_p)), key=lambda k: monomial_key(_lm(out_p[k])))
    return _Basis(basis.n, [out_p[k] for k in order], [out_c[k] for k in order], basis.ngen)


def buchberger(generators):
    """Reduced monic Groebner basis (list of Poly, ascending leading monomial)."""
    if not generators:
        return []
    n = generators[0].n
    basis = _buchberger(n, [_poly_to_dict(g) for g in generators], False)
    return [_dict_to_poly(n, p) for p in basis.polys]


def s_polynomials_reduce(gb):
    """True iff every S-polynomial of ``gb`` reduces to zero."""
    if not gb:
        return True
    n = gb[0].n
    polys = [_poly_to_dict(g) for g in gb]
    basis = _Basis(n, polys, [[] for _ in polys])
    for i, j in combinations(range(len(polys)), 2):
        a, b = basis.lms[i], basis.lms[j]
        lcm = _lcm(a, b)
        s = _add_into(_add_into({}, polys[i], 1 / Fraction(polys[i][a]), _mono_div(lcm, a)),
                      polys[j], -1 / Fraction(polys[j][b]), _mono_div(lcm, b))
        if _reduce(s, basis)[0]:
            return False
    return True


# ---- orbit ideals ----------------------------------------------------------

class OrbitIdeal:
    """The ideal (p_i - c_i^0) of a coadjoint orbit."""

    def __init__(self, algebra, c0):
        if len(c0) != algebra.m:
            raise UsageError(f"need {algebra.m} orbit constant(s), got {len(c0)}")
        self.algebra = algebra
        self.n = algebra.n
        self.c0 = tuple(as_rational(c) for c in c0)
        self.invariants = list(algebra.invariants)
        self.generators = [p - c for p, c in zip(self.invariants, self.c0)]
        self.weights = [p.degree() for p in self.invariants]
        gens = [_poly_to_dict(g) for g in self.generators]
        self._gb = _buchberger(self.n, gens, False)
        self._hom = _buchberger(self.n, [_top_form(_poly_to_dict(p)) for p in self.invariants], True)
        self._hom_gens = [_top_form(_poly_to_dict(p)) for p in self.invariants]
        if sorted(self._gb.lms) != sorted(self._hom.lms):
            raise InternalError("orbit ideal and top-form ideal have different leading terms; "
                                "invariants do not form a regular sequence")
        self.groebner = [_dict_to_poly(self.n, p) for p in self._gb.polys]
        self.leading = list(self._gb.lms)
        self._nf_cache = {}
        self._basis_cache = {}
        self._kostant_cache = {}

    def __repr__(self):
        return f"OrbitIdeal({self.algebra.name}, c0={list(map(str, self.c0))})"

    def in_staircase(self, e):
        return not any(_divides(lm, e) for lm in self.leading)

    def contains(self, f):
        return normal_form(f, self).is_zero()


def orbit_ideal(A, c0):
    """Cached :class:`OrbitIdeal` for algebra ``A`` and constants ``c0``."""
    key = ("orbit", tuple(as_rational(c) for c in c0))
    hit = A._cache.get(key)
    if hit is None:
        hit = A._cache[key] = OrbitIdeal(A, c0)
    return hit


def _nf_monomial(e, I):
    hit = I._nf_cache.get(e)
    if hit is None:
        hit = _reduce({e: 1}, I._gb)[0]
        I._nf_cache[e] = hit
    return hit


def normal_form(f, I):
    """Remainder of ``f`` modulo the Groebner basis, h-component by component."""
    if f.n != I.n:
        raise UsageError(f"expected a polynomial in {I.n} variables")
    out = {}
    for (e, k), c in f.flat_items():
        for ee, d in _nf_monomial(e, I).items():
            key = (ee, k)
            out[key] = out.get(key, 0) + c * d
    return Poly._raw(I.n, {key: c for key, c in out.items() if c})


def is_normal_form(f, I):
    return all(I.in_staircase(e) for (e, _), _ in f.flat_items())


def _monomials_of_degree(n, d):
    if n == 1:
        yield (d,)
        return
    for a in range(d, -1, -1):
        for rest in _monomials_of_degree(n - 1, d - a):
            yield (a,) + rest


class OrbitBasis:
    """Staircase monomials grouped by degree."""

    def __init__(self, by_degree):
        self.by_degree = by_degree

    def degree(self, d):
        return self.by_degree.get(d, [])

    def all(self):
        return [e for d in sorted(self.by_degree) for e in self.by_degree[d]]

    def __len__(self):
        return sum(len(v) for v in self.by_degree.values())

    def counts(self):
        return {d: len(v) for d, v in sorted(self.by_degree.items())}


def _staircase_degree(I, d):
    hit = I._basis_cache.get(d)
    if hit is None:
        hit = [e for e in _monomials_of_degree(I.n, d) if I.in_staircase(e)]
        hit.sort(key=monomial_key)
        I._basis_cache[d] = hit
    return hit


def monomial_basis(I, d):
    """Staircase monomials of degree at most ``d``."""
    return OrbitBasis({k: list(_staircase_degree(I, k)) for k in range(d + 1)})


# ---- decompositions ----------------------------------------------------------

def _hom_divide(top, I):
    """Split a homogeneous dict as sum Q_i p_i + r with Q_i homogeneous of
    degree deg(top) - deg(p_i) and r in the span of B."""
    d = _deg(next(iter(top)))
    rem, quot = _reduce(top, I._hom, True)
    qs = []
    for i, q in enumerate(quot):
        want = d - I.weights[i]
        qs.append({e: c for e, c in q.items() if _deg(e) == want})
    # cofactor truncation is exact for homogeneous input; confirm it
    check = dict(rem)
    for q, p in zip(qs, I._hom_gens):
        _add_into(check, _mul(q, p))
    if check != {e: c for e, c in top.items() if c}:
        raise InternalError("homogeneous division failed to reproduce its input")
    return rem, qs


def _witness_dict(f, I):
    """f = sum q_i (p_i - c_i) + r with deg q_i <= deg f - deg p_i."""
    f = dict(f)
    gens = [_poly_to_dict(g) for g in I.generators]
    qs = [{} for _ in gens]
    rem = {}
    while f:
        top = _top_form(f)
        r, parts = _hom_divide(top, I)
        _add_into(rem, r)
        _add_into(f, r, -1)
        for i, q in enumerate(parts):
            if q:
                _add_into(qs[i], q)
                _add_into(f, _mul(q, gens[i]), -1)
    return qs, rem


def ideal_witness(f, I):
    """Return (q, r) with f == sum q_i (p_i - c_i^0) + r and r == normal_form(f).

    Works one h-degree at a time, so h-dependent input is fine."""
    if f.n != I.n:
        raise UsageError(f"expected a polynomial in {I.n} variables")
    qs = [{} for _ in I.generators]
    rem = {}
    for k in range(f.h_degree() + 1) if f else ():
        part = {e: c for (e, j), c in f.flat_items() if j == k}
        if not part:
            continue
        q, r = _witness_dict(part, I)
        for i, qi in enumerate(q):
            for e, c in qi.items():
                qs[i][(e, k)] = qs[i].get((e, k), 0) + c
        for e, c in r.items():
            rem[(e, k)] = c
    return ([Poly._raw(I.n, {key: c for key, c in q.items() if c}) for q in qs],
            Poly._raw(I.n, {key: c for key, c in rem.items() if c}))


def _power_product(alpha, polys, n, cache):
    hit = cache.get(alpha)
    if hit is None:
        hit = {(0,) * n: 1}
        for a, p in zip(alpha, polys):
            for _ in range(a):
                hit = _mul(hit, p)
        cache[alpha] = hit
    return hit


def _alphas(weights, budget):
    if not weights:
        yield ()
        return
    w = weights[0]
    for a in range(budget // w + 1):
        for rest in _alphas(weights[1:], budget - a * w):
            yield (a,) + rest


class _Combo(dict):
    """Formal combination of equation labels, used as a symbolic right-hand
    side so one elimination serves every top form of a given degree."""

    def __sub__(self, other):
        out = _Combo(self)
        for k, v in other.items():
            nv = out.get(k, 0) - v
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
        return out

    def __mul__(self, c):
        return _Combo({k: v * c for k, v in self.items()}) if c else _Combo()

    __rmul__ = __mul__


def _top_inverse(I, D):
    """For each degree-D monomial e: the (alpha, b) coefficients of the unique
    combination sum c (p_top)^alpha b equal to x^e."""
    hit = I._kostant_cache.get(D)
    if hit is not None:
        return hit
    tops = I._hom_gens
    tcache = {}
    system = SparseSystem(pivot_key=lambda col: (col[0], monomial_key(col[1])))
    unknowns = []
    rows = {}
    for alpha in _alphas(I.weights, D):
        rest = D - sum(a * w for a, w in zip(alpha, I.weights))
        for b in _staircase_degree(I, rest):
            col = (alpha, b)
            unknowns.append(col)
            for e, c in _power_product(alpha, tops, I.n, tcache).items():
                rows.setdefault(tuple(x + y for x, y in zip(e, b)), {})[col] = c
    # every monomial of degree D gives an equation
    for e in _monomials_of_degree(I.n, D):
        try:
            system.add(rows.get(e, {}), _Combo({e: 1}), tag=e)
        except Inconsistent:
            raise InternalError("basis B not spanning")
    if system.free_dimension(unknowns):
        raise InternalError("basis B not independent")
    table = {}
    for col, combo in system.solve().items():
        for e, c in combo.items():
            table.setdefault(e, {})[col] = c
    I._kostant_cache[D] = table
    return table


def _decompose_solve(f, I):
    gens = [_poly_to_dict(g) for g in I.generators]
    gcache = {}
    f = dict(f)
    out = {}
    while f:
        top = _top_form(f)
        D = _deg(next(iter(top)))
        table = _top_inverse(I, D)
        sol = {}
        for e, c in top.items():
            for col, d in table.get(e, {}).items():
                sol[col] = sol.get(col, 0) + c * d
        for (alpha, b), c in sol.items():
            if not c:
                continue
            out[(alpha, b)] = out.get((alpha, b), 0) + c
            _add_into(f, _power_product(alpha, gens, I.n, gcache), -c, b)
        if f and max(map(_deg, f)) >= D:
            raise InternalError("degree did not drop during decomposition")
    return out


def _decompose_division(f, I, alpha0, out):
    """Recursive peeling: f = sum q_i (p_i - c_i) + r, then recurse on q_i."""
    if not f:
        return
    qs, r = _witness_dict(f, I)
    for e, c in r.items():
        key = (alpha0, e)
        out[key] = out.get(key, 0) + c
    for i, q in enumerate(qs):
        if q:
            alpha = alpha0[:i] + (alpha0[i] + 1,) + alpha0[i + 1:]
            _decompose_division(q, I, alpha, out)


def kostant_decompose(f, I, method="solve"):
    """Unique expansion f = sum coeff * (p - c0)^alpha * b with b in B.

    Returns a sorted list of ``(alpha, b, coeff)``.  ``method`` is ``"solve"``
    (per-degree linear solve) or ``"division"`` (recursive Groebner peeling);
    both must agree."""
    if f.n != I.n:
        raise UsageError(f"expected a polynomial in {I.n} variables")
    fd = _poly_to_dict(f)
    if method == "solve":
        out = _decompose_solve(fd, I)
    elif method == "division":
        out = {}
        _decompose_division(fd, I, (0,) * len(I.generators), out)
    else:
        raise UsageError(f"unknown method {method!r}")
    return sorted(((a, b, as_rational(c)) for (a, b), c in out.items() if c),
                  key=lambda t: (t[0], monomial_key(t[1])))


def reconstruct(terms, I):
    """Re-expand a decomposition into a polynomial."""
    gens = [_poly_to_dict(g) for g in I.generators]
    cache = {}
    acc = {}
    for alpha, b, c in terms:
        _add_into(acc, _power_product(alpha, gens, I.n, cache), c, b)
    return _dict_to_poly(I.n, acc)
