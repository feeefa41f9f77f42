"""Symmetrization map S(g) -> U_h, its inverse, and the induced star product.

``sym(x^a)`` is the average over all orderings of the letters of ``a``.  We
sum each distinct arrangement once through the recursion
``W(a) = sum_i W(a - e_i) * X_i`` (every distinct word ends in exactly one
letter) and divide by the multinomial coefficient; the result equals the
average over all k! permutations.
"""

from fractions import Fraction
from math import factorial

from .coeff import Poly, as_rational
from .errors import UsageError
from .pbw import PBWElement, pbw_mul, word_product


def _tables(A):
    t = A._cache.get("weyl")
    if t is None:
        t = A._cache["weyl"] = {"words": {}, "sym": {}, "inv": {}, "star": {}}
    return t


def _word_sum(A, a, memo):
    """Sum of all distinct words with letter multiplicities ``a`` as a
    homogeneous table {sorted word: rational}."""
    hit = memo.get(a)
    if hit is not None:
        return hit
    if not any(a):
        out = {(): 1}
    else:
        out = {}
        for i, ai in enumerate(a):
            if ai:
                prev = a[:i] + (ai - 1,) + a[i + 1:]
                for w, c in _word_sum(A, prev, memo).items():
                    for v, d in word_product(A, w, (i + 1,)).items():
                        out[v] = out.get(v, 0) + c * d
        out = {w: c for w, c in out.items() if c}
    memo[a] = out
    return out


def _multinomial(a):
    r = factorial(sum(a))
    for x in a:
        r //= factorial(x)
    return r


def sym_monomial(a, A):
    """sym(x^a) as {sorted word: rational}; word v carries h^(|a| - |v|)."""
    a = tuple(a)
    if len(a) != A.n:
        raise UsageError(f"exponent {a} does not have length {A.n}")
    t = _tables(A)
    hit = t["sym"].get(a)
    if hit is None:
        m = _multinomial(a)
        hit = {w: as_rational(Fraction(c) / m) for w, c in _word_sum(A, a, t["words"]).items()}
        t["sym"][a] = hit
    return hit


def sym(f, A):
    """PBW expansion of the symmetrization of ``f`` (extended Q[h]-linearly)."""
    if f.n != A.n:
        raise UsageError(f"expected a polynomial in {A.n} variables")
    out = {}
    for (e, k), c in f.flat_items():
        deg = sum(e)
        for w, d in sym_monomial(e, A).items():
            key = (w, k + deg - len(w))
            out[key] = out.get(key, 0) + c * d
    return PBWElement._raw({key: c for key, c in out.items() if c})


def _word_exps(w, n):
    e = [0] * n
    for i in w:
        e[i - 1] += 1
    return tuple(e)


def _sym_inv_word(A, w):
    """sym_inv of a sorted word as {(exps, h_power): rational}."""
    t = _tables(A)["inv"]
    hit = t.get(w)
    if hit is not None:
        return hit
    e = _word_exps(w, A.n)
    out = {(e, 0): 1}
    # x^e = sym^{-1}(w) + sum over lower words v of s_v h^(|w|-|v|) sym^{-1}(v)
    for v, s in sym_monomial(e, A).items():
        if v == w:
            continue
        shift = len(w) - len(v)
        for (ee, k), c in _sym_inv_word(A, v).items():
            key = (ee, k + shift)
            out[key] = out.get(key, 0) - s * c
    out = {key: c for key, c in out.items() if c}
    t[w] = out
    return out


def sym_inv(u, A):
    """The unique polynomial f with sym(f) == u."""
    out = {}
    for (w, k), c in u.flat_items():
        for (e, j), d in _sym_inv_word(A, w).items():
            key = (e, j + k)
            out[key] = out.get(key, 0) + c * d
    return Poly._raw(A.n, {key: c for key, c in out.items() if c})


def _star_monomials(A, a, b):
    t = _tables(A)["star"]
    key = (a, b)
    hit = t.get(key)
    if hit is None:
        ua = sym(Poly.monomial(a), A)
        ub = sym(Poly.monomial(b), A)
        hit = sym_inv(pbw_mul(ua, ub, A), A)
        t[key] = hit
    return hit


def star_s(f, g, A):
    """Sym^{-1}(Sym(f) Sym(g)), computed monomial pair by monomial pair."""
    if f.n != A.n or g.n != A.n:
        raise UsageError(f"expected polynomials in {A.n} variables")
    out = {}
    for (a, ka), ca in f.flat_items():
        for (b, kb), cb in g.flat_items():
            cc = ca * cb
            for (e, k), d in _star_monomials(A, a, b).flat_items():
                key = (e, k + ka + kb)
                out[key] = out.get(key, 0) + cc * d
    return Poly._raw(A.n, {key: c for key, c in out.items() if c})


def restrict_heisenberg_moyal(f, g, c, A=None):
    """f star_S g on the Heisenberg algebra with the central x3 set to ``c``,
    returned as a polynomial in (x1, x2)."""
    if A is None:
        from .lie import catalog
        A = catalog("heisenberg")
    if A.n != 3:
        raise UsageError("restriction expects the 3-dimensional Heisenberg algebra")
    for p in (f, g):
        if p.n == 2:
            continue
        if p.n != 3 or any(e[2] for (e, _), _ in p.flat_items()):
            raise UsageError("inputs must be polynomials in x1, x2 only")
    f3 = f if f.n == 3 else f.embed(3)
    g3 = g if g.n == 3 else g.embed(3)
    r = star_s(f3, g3, A).substitute({3: c})
    return Poly._raw(2, {(e[:2], k): v for (e, k), v in r.flat_items()})
