"""Quantization map psi, the products star_P and star_P on the orbit, the
equivalence eta = Sym^{-1} o psi, and tools around them: tangentiality
checks, the Delta(h) bookkeeping for shifted Casimirs, and an order-by-order
equivalence solver.

psi sends (p - c0)^a * b (b a staircase monomial) to
(P_1 - c_1(h))^{a_1} ... (P_m - c_m(h))^{a_m} X_{j1} ... X_{jl} with
P_i = sym(p_i).  Its leading word-length part is the identity, so the
inverse is computed one word at a time by subtracting leading parts.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from math import factorial

from .coeff import HPoly, Poly, as_rational, monomial_key
from .errors import UsageError
from .lie import abelian, with_constants
from .linalg import Inconsistent, SparseSystem
from .orbit import (OrbitIdeal, ideal_witness, is_normal_form, kostant_decompose,
                    normal_form, orbit_ideal)
from .pbw import PBWElement, normal_order, pbw_mul
from .weyl import star_s, sym, sym_inv


def _hpoly(c):
    if isinstance(c, HPoly):
        return c
    if isinstance(c, Poly):
        if c.degree() > 0:
            raise UsageError("c(h) must not depend on x")
        return HPoly(c.coeff((0,) * c.n, k) for k in range(c.h_degree() + 1)) if c else HPoly()
    return HPoly((as_rational(c),))


class QuantizationData:
    """Orbit ideal plus the deformed constants c_i(h) with c_i(0) = c_i^0."""

    def __init__(self, ideal, c_h=None, symmetrized=False):
        self.ideal = ideal
        self.algebra = ideal.algebra
        self.n = ideal.n
        if c_h is None:
            c_h = [HPoly((c,)) for c in ideal.c0]
        c_h = [_hpoly(c) for c in c_h]
        if len(c_h) != len(ideal.c0):
            raise UsageError(f"need {len(ideal.c0)} deformed constant(s)")
        for c, c0 in zip(c_h, ideal.c0):
            if c[0] != c0:
                raise UsageError(f"c(h) = {c} does not reduce to c0 = {c0} at h = 0")
        self.c_h = c_h
        self.delta = [HPoly(c.coeffs[1:]) for c in c_h]
        self.symmetrized = symmetrized
        self._psi = {}
        self._psi_terms = {}
        self._inv = {}
        self._star = {}
        self._gen_images = None

    @classmethod
    def build(cls, A, c0, c_h=None, symmetrized=False):
        return cls(orbit_ideal(A, c0), c_h, symmetrized)

    def __repr__(self):
        cs = ", ".join(str(c) for c in self.c_h)
        return f"QuantizationData({self.algebra.name}, c(h)=[{cs}])"

    def generator_images(self):
        """P_i - c_i(h) in U_h."""
        if self._gen_images is None:
            A = self.algebra
            self._gen_images = [sym(p, A) - PBWElement.scalar(c)
                                for p, c in zip(self.ideal.invariants, self.c_h)]
        return self._gen_images


def _psi_term(alpha, b, Q, cache):
    key = (alpha, b)
    hit = cache.get(key)
    if hit is None:
        A = Q.algebra
        if Q.symmetrized:
            hit = sym(Poly.monomial(b), A)
        else:
            word = tuple(i + 1 for i, k in enumerate(b) for _ in range(k))
            hit = normal_order(word, A)
        for g, a in zip(Q.generator_images(), alpha):
            for _ in range(a):
                hit = pbw_mul(g, hit, A)
        cache[key] = hit
    return hit


def _psi_monomial(e, Q):
    hit = Q._psi.get(e)
    if hit is None:
        cache = Q._psi_terms
        hit = PBWElement.zero()
        for alpha, b, c in kostant_decompose(Poly.monomial(e), Q.ideal):
            hit = hit + _psi_term(alpha, b, Q, cache).scale(c)
        Q._psi[e] = hit
    return hit


def psi(f, Q):
    """The quantization map C[g*][h] -> U_h (Q[h]-linear)."""
    if f.n != Q.n:
        raise UsageError(f"expected a polynomial in {Q.n} variables")
    out = PBWElement.zero()
    for e, hp in f.terms.items():
        out = out + _psi_monomial(e, Q).scale(hp)
    return out


def _word_to_exps(w, n):
    e = [0] * n
    for i in w:
        e[i - 1] += 1
    return tuple(e)


def _psi_inv_word(w, Q):
    hit = Q._inv.get(w)
    if hit is not None:
        return hit
    n = Q.n
    e = _word_to_exps(w, n)
    out = {(e, 0): 1}
    # x^e = psi^{-1}(w) + psi^{-1}(psi(x^e) - w), the second part has shorter words
    for (v, k), c in _psi_monomial(e, Q).flat_items():
        if v == w and k == 0:
            continue
        if len(v) >= len(w):
            raise UsageError("psi is not unitriangular on words; check the ideal data")
        for (ee, j), d in _psi_inv_word(v, Q).items():
            key = (ee, j + k)
            out[key] = out.get(key, 0) - c * d
    out = {key: c for key, c in out.items() if c}
    Q._inv[w] = out
    return out


def psi_inv(u, Q):
    """Unique preimage of ``u`` under psi."""
    out = {}
    # longest words first, lexicographic within a length
    for (w, k), c in sorted(u.flat_items(), key=lambda kv: (-len(kv[0][0]), kv[0][0], kv[0][1])):
        for (e, j), d in _psi_inv_word(w, Q).items():
            key = (e, j + k)
            out[key] = out.get(key, 0) + c * d
    return Poly._raw(Q.n, {key: c for key, c in out.items() if c})


def _bilinear(f, g, n, monomial_product):
    out = {}
    for (a, ka), ca in f.flat_items():
        for (b, kb), cb in g.flat_items():
            cc = ca * cb
            for (e, k), d in monomial_product(a, b).flat_items():
                key = (e, k + ka + kb)
                out[key] = out.get(key, 0) + cc * d
    return Poly._raw(n, {key: c for key, c in out.items() if c})


def star_p(f, g, Q):
    """psi^{-1}(psi(f) psi(g))."""
    if f.n != Q.n or g.n != Q.n:
        raise UsageError(f"expected polynomials in {Q.n} variables")

    def mono(a, b):
        key = (a, b)
        hit = Q._star.get(key)
        if hit is None:
            u = pbw_mul(_psi_monomial(a, Q), _psi_monomial(b, Q), Q.algebra)
            hit = Q._star[key] = psi_inv(u, Q)
        return hit

    return _bilinear(f, g, Q.n, mono)


def star_p_orbit(f, g, Q):
    """The product induced on the quotient by the orbit ideal; inputs must be
    in normal form."""
    for name, p in (("left", f), ("right", g)):
        if not is_normal_form(p, Q.ideal):
            raise UsageError(f"{name} factor is not in normal form for {Q.ideal}")
    return normal_form(star_p(f, g, Q), Q.ideal)


def eta(f, Q):
    """Sym^{-1}(psi(f)); intertwines star_P with star_S."""
    return sym_inv(psi(f, Q), Q.algebra)


# ---- star product handles ------------------------------------------------------

class StarProduct:
    """A named bilinear product on polynomials in ``n`` variables."""

    def __init__(self, name, n, mul):
        self.name = name
        self.n = n
        self._mul = mul

    def __call__(self, f, g):
        return self._mul(f, g)

    def __repr__(self):
        return f"StarProduct({self.name!r})"


def star_s_handle(A):
    return StarProduct("S", A.n, lambda f, g: star_s(f, g, A))


def star_p_handle(Q):
    return StarProduct("P", Q.n, lambda f, g: star_p(f, g, Q))


# ---- tangentiality ----------------------------------------------------------------

@dataclass
class TangentialityReport:
    passed: bool
    checked: int
    witness: tuple = None  # (generator, sample, side, normal form)

    def describe(self, fmt=str):
        if self.passed:
            return f"tangential on {self.checked} product(s)"
        g, f, side, nf = self.witness
        lhs = f"({fmt(g)}) * ({fmt(f)})" if side == "left" else f"({fmt(f)}) * ({fmt(g)})"
        return f"{lhs} reduces to {fmt(nf)} modulo the ideal"


def default_sample(n, degree=2):
    """Coordinates first, then the remaining monomials up to ``degree``."""
    from .orbit import _monomials_of_degree
    out = [Poly.var(n, i) for i in range(1, n + 1)]
    out.append(Poly.one(n))
    for d in range(2, degree + 1):
        out.extend(Poly.monomial(e) for e in sorted(_monomials_of_degree(n, d), key=monomial_key))
    return out


def tangentiality_check(star, I, sample=None):
    """Check that g_i * f and f * g_i lie in the commutative ideal for every
    generator g_i = p_i - c_i^0 and sample f; stops at the first witness."""
    if sample is None:
        sample = default_sample(I.n)
    checked = 0
    for f in sample:
        for g in I.generators:
            for side in ("left", "right"):
                prod = star(g, f) if side == "left" else star(f, g)
                checked += 1
                nf = normal_form(prod, I)
                if nf:
                    return TangentialityReport(False, checked, (g, f, side, nf))
    return TangentialityReport(True, checked)


# ---- shifted Casimirs ----------------------------------------------------------------

class GeneratorShift:
    """Center data z_i(p, h): polynomials in the invariant values p_1..p_m
    (variables x1..xm of an m-variable Poly) and h.  The image of p_i under
    the equivalence on the center is p_i + a_i with a_i = h z_i."""

    def __init__(self, z):
        z = list(z)
        if not z:
            raise UsageError("need at least one z_i")
        m = z[0].n
        if any(zi.n != m for zi in z) or len(z) != m:
            raise UsageError("z must be m polynomials in m invariant variables")
        self.z = z
        self.m = m

    def a(self):
        return [zi.shift_h(1) for zi in self.z]


@dataclass
class DeltaResult:
    delta: list
    b: list
    det_at_zero: Poly
    invertible: bool
    identity_holds: bool
    orbit_membership: bool = None
    witnesses: list = field(default_factory=list)


def _invariant_ideal(m, c0):
    """The linear ideal (p_j - c_j^0) in the ring of invariant values."""
    R = with_constants(abelian(m), invariants=[Poly.var(m, j) for j in range(1, m + 1)],
                       name=f"invariants{m}")
    return OrbitIdeal(R, c0)


def _det(M):
    if len(M) == 1:
        return M[0][0]
    total = None
    for j, entry in enumerate(M[0]):
        minor = [row[:j] + row[j + 1:] for row in M[1:]]
        term = entry * _det(minor)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def compute_delta(Q, shift):
    """Delta_i(h) = z_i(c0, h) together with the factorization
    z_i - Delta_i = sum_j b_ij (p_j - c_j^0) and the matrix delta + h b."""
    m = len(Q.ideal.c0)
    if shift.m != m:
        raise UsageError(f"shift has {shift.m} invariant variables, algebra has {m}")
    c0 = Q.ideal.c0
    J = _invariant_ideal(m, c0)
    point = {j + 1: c for j, c in enumerate(c0)}
    deltas, b_rows, ok = [], [], True
    for zi in shift.z:
        d = zi.substitute(point)
        deltas.append(HPoly(d.coeff((0,) * m, k) for k in range(d.h_degree() + 1)) if d else HPoly())
        qs, rem = ideal_witness(zi - d, J)
        if rem:
            ok = False
        recon = d + rem
        for q, g in zip(qs, J.generators):
            recon = recon + q * g
        ok = ok and recon == zi
        b_rows.append(qs)
    h = Poly.hvar(m)
    M = [[(Poly.one(m) if i == j else Poly.zero(m)) + h * b_rows[i][j] for j in range(m)]
         for i in range(m)]
    det0 = _det(M).h_part(0)
    invertible = det0.degree() == 0 and not det0.is_zero()
    # substitute p = p(x): the differences must lie in the orbit ideal
    images = list(Q.ideal.invariants)
    members, witnesses = True, []
    for zi, d in zip(shift.z, deltas):
        diff = zi.compose(images) - Poly.from_hpoly(Q.n, d)
        qs, rem = ideal_witness(diff, Q.ideal)
        members = members and rem.is_zero()
        witnesses.append(qs)
    return DeltaResult(deltas, b_rows, det0, invertible, ok, members, witnesses)


def center_coefficients(a, order):
    """a^{(j)} = prod_i a_i^{j_i} / j_i! for all multi-indices with |j| <= order."""
    m = len(a)
    out = {}
    for j in iproduct(range(order + 1), repeat=m):
        if sum(j) > order:
            continue
        term = Poly.one(a[0].n)
        denom = 1
        for ai, ji in zip(a, j):
            term = term * ai ** ji
            denom *= factorial(ji)
        out[j] = term.scale(Fraction(1, denom))
    return out


def apply_on_center(F, a):
    """sum_j a^{(j)} d^j F / dp^j for a polynomial F(p_1..p_m)."""
    m = F.n
    out = Poly.zero(m)
    for j, coef in center_coefficients(a, F.degree()).items():
        g = F
        for i, ji in enumerate(j):
            for _ in range(ji):
                g = g.partial(i + 1)
        if g:
            out = out + coef * g
    return out


def gq_mismatch(l, shift, order):
    """Compare the Casimir value l(l + h) with the one forced by ``shift``
    (c(h) = c0 + h z(c0, h), c0 = l^2).  Returns the lowest h-order at which
    they differ, up to ``order``, or None if they agree."""
    l = as_rational(l)
    A = with_constants(abelian(1), invariants=[Poly.var(1, 1)], name="center1")
    Q = QuantizationData(OrbitIdeal(A, [l * l]))
    forced = compute_delta(Q, shift).delta[0]
    target = HPoly((l,))
    for k in range(order + 1):
        if forced[k] != target[k]:
            return k + 1
    return None


# ---- equivalence solver --------------------------------------------------------------

@dataclass
class EquivalenceResult:
    success: bool
    operators: dict  # order -> {monomial exps: Poly}
    residual: object = None
    failed_order: int = None
    message: str = ""

    def matrix(self, n_order, monomials):
        """Dense matrix of T_n on the given list of monomials (columns)."""
        T = self.operators.get(n_order, {})
        rows = sorted({e for col in monomials for (e, _), _ in T.get(col, Poly.zero(len(col))).flat_items()}
                      | set(monomials), key=monomial_key, reverse=True)
        return rows, [[T[col].coeff(r) if col in T else 0 for col in monomials] for r in rows]


def _monomials_upto(n, d):
    from .orbit import _monomials_of_degree
    return [e for k in range(d + 1) for e in _monomials_of_degree(n, k)]


def _apply(T, f, n):
    """Apply an h-free linear operator (dict monomial -> Poly) Q[h]-linearly."""
    out = {}
    for (e, k), c in f.flat_items():
        img = T.get(e)
        if img is None:
            continue
        for (ee, j), d in img.flat_items():
            key = (ee, j + k)
            out[key] = out.get(key, 0) + c * d
    return Poly._raw(n, {key: c for key, c in out.items() if c})


def _apply_total(Ts, f, n, top):
    """(sum_k h^k T_k) f truncated after h^top (T_0 = Id)."""
    out = f.truncate_h(top)
    for k, T in Ts.items():
        if k <= top:
            out = out + _apply(T, f, n).shift_h(k)
    return out.truncate_h(top)


def equivalence_solver(starA, starB, n, d, r, fix_generators=True, degree_drop=True):
    """Find T = Id + sum h^k T_k with T(f *A g) = T(f) *B T(g) mod h^(r+1) for
    all monomials f, g of degree <= d.

    Unknowns are T_k(m) for monomials m of degree <= 2d; with
    ``degree_drop`` the image T_k(m) is sought among monomials of degree
    <= deg m - k (true for products graded by total degree with h of weight
    one).  ``fix_generators`` imposes T_k(x_i) = 0."""
    mons = _monomials_upto(n, d)
    big = _monomials_upto(n, 2 * d)
    Apairs = {}
    Bcache = {}

    def Aprod(a, b):
        key = (a, b)
        if key not in Apairs:
            Apairs[key] = starA(Poly.monomial(a), Poly.monomial(b)).truncate_h(r)
        return Apairs[key]

    def Bprod(f, g):
        key = (f, g)
        if key not in Bcache:
            Bcache[key] = starB(f, g).truncate_h(r)
        return Bcache[key]

    Ts = {}
    for order in range(1, r + 1):
        system = SparseSystem(pivot_key=lambda v: (sum(v[0]), monomial_key(v[0]), monomial_key(v[1])))
        targets = {}
        for m in big:
            dm = sum(m)
            limit = dm - order if degree_drop else dm
            if limit < 0 or (not any(m)):
                targets[m] = []
                continue
            if fix_generators and dm == 1:
                targets[m] = []
                continue
            targets[m] = _monomials_upto(n, limit)
        lower = {k: T for k, T in Ts.items() if k < order}
        for ia, a in enumerate(mons):
            for b in mons[ia:]:
                fa, fb = Poly.monomial(a), Poly.monomial(b)
                # RHS: known lower-order contributions at h^order
                lhs_known = _apply_total(lower, Aprod(a, b), n, order).h_part(order)
                Ta = _apply_total(lower, fa, n, order)
                Tb = _apply_total(lower, fb, n, order)
                rhs = Bprod(Ta, Tb).h_part(order)
                diff = rhs - lhs_known
                ab = tuple(x + y for x, y in zip(a, b))
                rows = {}
                for mono, sign, mult in ((ab, 1, None), (a, -1, b), (b, -1, a)):
                    for mu in targets.get(mono, []):
                        e = mu if mult is None else tuple(x + y for x, y in zip(mu, mult))
                        rows.setdefault(e, {})
                        key = (mono, mu)
                        rows[e][key] = rows[e].get(key, 0) + sign
                support = set(rows) | {e for (e, _), _ in diff.flat_items()}
                for e in support:
                    try:
                        system.add(rows.get(e, {}), diff.coeff(e), tag=(order, a, b, e))
                    except Inconsistent as exc:
                        return EquivalenceResult(False, Ts, exc.residual, order,
                                                 f"not equivalent at order {order}: "
                                                 f"pair {a}, {b}, monomial {exc.tag[3]}, residual {exc.residual}")
        sol = system.solve()
        T = {}
        for (mono, mu), c in sol.items():
            T[mono] = T.get(mono, Poly.zero(n)) + Poly.monomial(mu, c)
        Ts[order] = {m: p for m, p in T.items() if p}
    residual = equivalence_residual(starA, starB, Ts, n, d, r)
    if residual:
        return EquivalenceResult(False, Ts, residual, None, "direct residual check failed")
    return EquivalenceResult(True, Ts, residual, None, "equivalent")


def equivalence_residual(starA, starB, Ts, n, d, r):
    """Largest-order nonzero defect T(f *A g) - T(f) *B T(g) mod h^(r+1) over
    monomial pairs of degree <= d, or 0."""
    mons = _monomials_upto(n, d)
    for ia, a in enumerate(mons):
        for b in mons[ia:]:
            fa, fb = Poly.monomial(a), Poly.monomial(b)
            lhs = _apply_total(Ts, starA(fa, fb).truncate_h(r), n, r)
            rhs = starB(_apply_total(Ts, fa, n, r), _apply_total(Ts, fb, n, r)).truncate_h(r)
            if lhs != rhs:
                return lhs - rhs
    return 0


def eta_operators(Q, d, r):
    """The equivalence eta written as operators T_k on monomials of degree <= d."""
    Ts = {}
    for e in _monomials_upto(Q.n, d):
        img = eta(Poly.monomial(e), Q)
        for k in range(1, r + 1):
            part = img.h_part(k)
            if part:
                Ts.setdefault(k, {})[e] = part
    return Ts
