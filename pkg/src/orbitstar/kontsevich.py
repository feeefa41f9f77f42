"""Order-two universal star product for polynomial Poisson structures.

    f * g = f g + h B1(f, g) + h^2 B2(f, g)          (mod h^3)
    B1 = 1/2 a^{ij} d_i f d_j g
    B2 = w_sym2 a^{ij} a^{kl} d_ik f d_jl g
         + w_loop a^{ij} d_j a^{kl} (d_ik f d_l g - d_k f d_il g)

The two weights are not hard-coded: :func:`solve_order2_weights` pins them
by demanding associativity mod h^3 on test triples over nonabelian linear
structures.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import random

from .coeff import Poly, as_rational
from .errors import InternalError, UsageError
from .linalg import Inconsistent, SparseSystem


class PoissonStructure:
    """Antisymmetric matrix of polynomial entries a^{ij}(x)."""

    def __init__(self, n, upper, name="poisson"):
        """``upper`` maps (i, j) with i < j (1-based) to a Poly."""
        self.n = n
        self.name = name
        self._a = {}
        for (i, j), v in upper.items():
            if not (1 <= i <= n and 1 <= j <= n) or i == j:
                raise UsageError(f"bad index pair {(i, j)}")
            if v.n != n:
                raise UsageError("entries must be polynomials in n variables")
            if v:
                if i > j:
                    i, j, v = j, i, -v
                self._a[(i, j)] = v
        self._da = {}

    def entry(self, i, j):
        if i == j:
            return Poly.zero(self.n)
        if i < j:
            return self._a.get((i, j), Poly.zero(self.n))
        v = self._a.get((j, i))
        return -v if v is not None else Poly.zero(self.n)

    def nonzero(self):
        """Iterate (i, j, a^{ij}) over all ordered pairs with nonzero entry."""
        for (i, j), v in self._a.items():
            yield i, j, v
            yield j, i, -v

    def d_entry(self, m, i, j):
        key = (m, i, j)
        hit = self._da.get(key)
        if hit is None:
            hit = self._da[key] = self.entry(i, j).partial(m)
        return hit

    def bracket(self, f, g):
        out = Poly.zero(self.n)
        for i, j, a in self.nonzero():
            fi, gj = f.partial(i), g.partial(j)
            if fi and gj:
                out = out + a * fi * gj
        return out

    def jacobi_defects(self):
        """Nonzero values of the Jacobi expression, keyed by (i, j, k)."""
        out = {}
        rng = range(1, self.n + 1)
        for i in rng:
            for j in rng:
                for k in rng:
                    s = Poly.zero(self.n)
                    for l in rng:
                        s = (s + self.entry(i, l) * self.d_entry(l, j, k)
                             + self.entry(j, l) * self.d_entry(l, k, i)
                             + self.entry(k, l) * self.d_entry(l, i, j))
                    if s:
                        out[(i, j, k)] = s
        return out

    def __repr__(self):
        return f"PoissonStructure({self.name!r}, n={self.n})"


def from_lie(A):
    """Linear structure a^{ij} = sum_k c_ij^k x_k."""
    upper = {}
    for i in range(1, A.n + 1):
        for j in range(i + 1, A.n + 1):
            v = Poly.zero(A.n)
            for k, c in A.brackets.get((i, j), {}).items():
                v = v + Poly.var(A.n, k).scale(c)
            if v:
                upper[(i, j)] = v
    return PoissonStructure(A.n, upper, A.name)


def quadratic_plane():
    """Nonlinear structure a^{12} = x1^2 on the plane."""
    return PoissonStructure(2, {(1, 2): Poly.var(2, 1) ** 2}, "plane-x1^2")


@dataclass(frozen=True)
class Order2Weights:
    w_sym2: Fraction
    w_loop: Fraction


class _Derivs:
    """Memoized partial derivatives of one polynomial."""

    def __init__(self, f):
        self.f = f
        self.memo = {(): f}

    def __call__(self, *idx):
        key = tuple(sorted(idx))
        hit = self.memo.get(key)
        if hit is None:
            hit = self(*key[:-1]).partial(key[-1])
            self.memo[key] = hit
        return hit


def b1(f, g, P):
    df, dg = _Derivs(f), _Derivs(g)
    out = Poly.zero(P.n)
    for i, j, a in P.nonzero():
        u, v = df(i), dg(j)
        if u and v:
            out = out + a * u * v
    return out.scale(Fraction(1, 2))


def b2_parts(f, g, P):
    """The two ansatz terms of B2, before weighting."""
    df, dg = _Derivs(f), _Derivs(g)
    sym2 = Poly.zero(P.n)
    loop = Poly.zero(P.n)
    pairs = list(P.nonzero())
    for i, j, a in pairs:
        for k, l, b in pairs:
            u, v = df(i, k), dg(j, l)
            if u and v:
                sym2 = sym2 + a * b * u * v
        for k, l, _ in pairs:
            da = P.d_entry(j, k, l)
            if not da:
                continue
            t = df(i, k) * dg(l) - df(k) * dg(i, l)
            if t:
                loop = loop + a * da * t
    return sym2, loop


def _h_free_bilinear(f, g, n, op):
    """Extend an h-free bilinear operator Q[h]-bilinearly."""
    out = Poly.zero(n)
    for k1 in range(f.h_degree() + 1) if f else ():
        fk = f.h_part(k1)
        if not fk:
            continue
        for k2 in range(g.h_degree() + 1) if g else ():
            gk = g.h_part(k2)
            if gk:
                out = out + op(fk, gk).shift_h(k1 + k2)
    return out


def star_k2(f, g, P, W=None):
    """f g + h B1 + h^2 B2, truncated after h^2."""
    if W is None:
        W = default_weights()
    if f.n != P.n or g.n != P.n:
        raise UsageError(f"expected polynomials in {P.n} variables")

    def op(a, b):
        s2, lp = b2_parts(a, b, P)
        return (a * b + b1(a, b, P).shift_h(1)
                + (s2.scale(W.w_sym2) + lp.scale(W.w_loop)).shift_h(2))

    return _h_free_bilinear(f, g, P.n, op).truncate_h(2)


def associativity_defect(f, g, k, P, W):
    """(f*g)*k - f*(g*k) truncated after h^2."""
    return (star_k2(star_k2(f, g, P, W), k, P, W)
            - star_k2(f, star_k2(g, k, P, W), P, W)).truncate_h(2)


def _h2_constraints(f, g, k, P):
    """Coefficients of h^2 in the associativity defect as
    {monomial: (coef of w_sym2, coef of w_loop, constant)}."""
    fg = f * g
    gk = g * k
    # w-dependent part: B2(fg, k) + B2(f, g) k - B2(f, gk) - f B2(g, k)
    parts = []
    for idx in range(2):
        t = (b2_parts(fg, k, P)[idx] + b2_parts(f, g, P)[idx] * k
             - b2_parts(f, gk, P)[idx] - f * b2_parts(g, k, P)[idx])
        parts.append(t)
    const = b1(b1(f, g, P), k, P) - b1(f, b1(g, k, P), P)
    rows = {}
    for idx, t in enumerate(parts + [const]):
        for (e, _), c in t.flat_items():
            rows.setdefault(e, [0, 0, 0])[idx] += c
    return rows


def random_poly(rng, n, max_deg=3, max_terms=3, coeff_range=3):
    """Sparse random polynomial (1..max_terms terms, nonzero coefficients)."""
    out = Poly.zero(n)
    for _ in range(rng.randint(1, max_terms)):
        deg = rng.randint(0, max_deg)
        e = [0] * n
        for _ in range(deg):
            e[rng.randrange(n)] += 1
        c = 0
        while c == 0:
            c = rng.randint(-coeff_range, coeff_range)
        out = out + Poly.monomial(e, c)
    return out


def solve_order2_weights(structures, triples=40, max_deg=3, seed=0):
    """Weights making star_k2 associative mod h^3 on random triples over the
    given structures.  Raises InternalError unless the solution is unique."""
    rng = random.Random(seed)
    system = SparseSystem()
    for P in structures:
        for t in range(triples):
            f, g, k = (random_poly(rng, P.n, max_deg) for _ in range(3))
            for e, (a, b, c) in _h2_constraints(f, g, k, P).items():
                try:
                    system.add({"w_sym2": a, "w_loop": b}, -c, tag=(P.name, t, e))
                except Inconsistent as exc:
                    raise InternalError(f"order-2 ansatz inconsistent on {P.name}: {exc}")
    if system.rank < 2:
        raise InternalError(f"order-2 weights underdetermined (rank {system.rank})")
    sol = system.solve()
    return Order2Weights(as_rational(sol.get("w_sym2", 0)), as_rational(sol.get("w_loop", 0)))


@lru_cache(maxsize=None)
def default_weights():
    """Weights solved on the su(2) and Heisenberg structures."""
    from .lie import catalog
    return solve_order2_weights([from_lie(catalog("su2")), from_lie(catalog("heisenberg"))])
