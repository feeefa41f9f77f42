"""h-graded differential and bidifferential operators with smooth coefficients.

A :class:`DiffOp` is sum_k h^k sum_a c_{k,a}(x) d^a, stored as one dict
``{multi-index: SmoothFunc}`` per h-order 0..H.  Functions flowing through
operators are *h-jets*: lists of length H+1 whose entries are :class:`Jet`
objects (or None for zero) at a common base point.
"""

from math import comb, factorial
from itertools import product as iproduct

from ..errors import UsageError
from .jets import jet_space
from .smooth import ONE, Evaluator, SmoothFunc, add, derivative_depth, deriv, lift, mul


def _zero_index(n):
    return (0,) * n


class DiffOp:
    def __init__(self, n, H, terms=None):
        self.n = n
        self.H = H
        self.terms = [dict() for _ in range(H + 1)]
        for k, row in (terms or {}).items():
            if k > H:
                continue
            for a, c in row.items():
                a = tuple(a)
                if len(a) != n:
                    raise UsageError(f"multi-index {a} does not have length {n}")
                c = lift(c)
                if isinstance(c, SmoothFunc) and not c.is_zero_const():
                    prev = self.terms[k].get(a)
                    self.terms[k][a] = c if prev is None else add(prev, c)

    @classmethod
    def identity(cls, n, H):
        return cls(n, H, {0: {_zero_index(n): ONE}})

    @classmethod
    def zero(cls, n, H):
        return cls(n, H)

    def order_slot(self, k):
        return self.terms[k]

    def max_derivative(self, k=None):
        ks = range(self.H + 1) if k is None else [k]
        return max((sum(a) for j in ks for a in self.terms[j]), default=0)

    def is_identity_at_zero(self):
        row = self.terms[0]
        z = _zero_index(self.n)
        if set(row) != {z}:
            return False
        c = row[z]
        return getattr(c, "value", None) == 1.0 and type(c).__name__ == "Const"

    def __add__(self, other):
        out = DiffOp(self.n, self.H)
        for src in (self, other):
            for k, row in enumerate(src.terms):
                for a, c in row.items():
                    prev = out.terms[k].get(a)
                    out.terms[k][a] = c if prev is None else add(prev, c)
        return out

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        """Multiply every coefficient by a number or SmoothFunc (on the left)."""
        s = lift(s)
        out = DiffOp(self.n, self.H)
        for k, row in enumerate(self.terms):
            for a, c in row.items():
                v = mul(s, c)
                if not v.is_zero_const():
                    out.terms[k][a] = v
        return out

    def shift_h(self, j):
        out = DiffOp(self.n, self.H)
        for k, row in enumerate(self.terms):
            if k + j <= self.H:
                out.terms[k + j] = dict(row)
        return out

    def depth(self):
        """Jet order consumed by coefficients (Deriv nodes) beyond their use."""
        return max((derivative_depth(c) for row in self.terms for c in row.values()), default=0)

    def __repr__(self):
        parts = []
        for k, row in enumerate(self.terms):
            for a, c in row.items():
                parts.append(f"h^{k}*{c!r}*d{list(a)}")
        return "DiffOp(" + " + ".join(parts) + ")"


# ---- h-jets -------------------------------------------------------------------------

def hjet_of(f, ev, order, H):
    """h-jet of an h-independent SmoothFunc (or pass an h-jet through)."""
    if isinstance(f, list):
        return f
    return [ev.eval(f, order)] + [None] * H


def _acc(slot, jet):
    return jet if slot is None else slot + jet


def apply_to_hjet(D, u, ev):
    """D applied to an h-jet ``u``; orders above D.H are dropped."""
    H = D.H
    out = [None] * (H + 1)
    for k, row in enumerate(D.terms):
        for b, ub in enumerate(u):
            if ub is None or k + b > H:
                continue
            for a, c in row.items():
                da = sum(a)
                if ub.order < da:
                    raise UsageError("jet order exhausted; increase the jet order K")
                d = ub.derivative(a)
                term = ev.eval(c, d.order) * d
                out[k + b] = _acc(out[k + b], term)
    return out


def hjet_values(u):
    return [0.0 if j is None else j.value for j in u]


def hjet_add(u, v):
    return [a if b is None else (b if a is None else a + b) for a, b in zip(u, v)]


def hjet_sub(u, v):
    return hjet_add(u, [None if b is None else -b for b in v])


def hjet_order(u):
    return min((j.order for j in u if j is not None), default=0)


def apply_diffop(D, f, x, K=None):
    """Values of D f at x, one per h-order."""
    need = D.max_derivative()
    if K is None:
        K = need
    if K < need:
        raise UsageError(f"jet order {K} is below the operator's derivative order {need}")
    x = tuple(float(v) for v in x)
    extra = D.depth() + (derivative_depth(f) if isinstance(f, SmoothFunc) else 0)
    ev = Evaluator(jet_space(D.n, K + extra), x)
    return hjet_values(apply_to_hjet(D, hjet_of(f, ev, K, D.H), ev))


# ---- composition, inversion, exponentials ---------------------------------------------

def _sub_indices(a):
    return iproduct(*[range(k + 1) for k in a])


def compose_diffops(D1, D2):
    """D1 o D2 with the Leibniz rule; h-orders above H are dropped."""
    if D1.n != D2.n:
        raise UsageError("operators act on different dimensions")
    H = min(D1.H, D2.H)
    n = D1.n
    acc = [dict() for _ in range(H + 1)]
    for k1, row1 in enumerate(D1.terms):
        for k2, row2 in enumerate(D2.terms):
            k = k1 + k2
            if k > H:
                continue
            for a, c1 in row1.items():
                for b, c2 in row2.items():
                    # d^a (c2 d^b f) = sum_g C(a,g) d^g c2 d^(a-g+b) f
                    for g in _sub_indices(a):
                        coef = 1
                        for ai, gi in zip(a, g):
                            coef *= comb(ai, gi)
                        dc2 = deriv(c2, g)
                        if dc2.is_zero_const():
                            continue
                        target = tuple(ai - gi + bi for ai, gi, bi in zip(a, g, b))
                        acc[k].setdefault(target, []).append(mul(float(coef), c1, dc2))
    out = DiffOp(n, H)
    for k, row in enumerate(acc):
        for a, cs in row.items():
            v = add(*cs)
            if not v.is_zero_const():
                out.terms[k][a] = v
    return out


def invert_diffop(D):
    """Neumann-series inverse sum_j (Id - D)^j, exact mod h^(H+1)."""
    if not D.is_identity_at_zero():
        raise UsageError("only operators equal to Id mod h can be inverted")
    N = DiffOp.identity(D.n, D.H) - D
    N.terms[0] = {}
    out = DiffOp.identity(D.n, D.H)
    power = DiffOp.identity(D.n, D.H)
    for _ in range(D.H):
        power = compose_diffops(power, N)
        out = out + power
    return out


def exp_diffop(X):
    """sum_j X^j / j! for X with empty h^0 slot."""
    if X.terms[0]:
        raise UsageError("exponent must vanish at h = 0")
    out = DiffOp.identity(X.n, X.H)
    power = DiffOp.identity(X.n, X.H)
    for j in range(1, X.H + 1):
        power = compose_diffops(power, X)
        out = out + power.scale(1.0 / factorial(j))
    return out


def apply_inverse(D, u, ev):
    """D^{-1} u by the Neumann recursion v = u + (Id - D) v, without building
    the inverse operator."""
    if not D.is_identity_at_zero():
        raise UsageError("only operators equal to Id mod h can be inverted")
    N = DiffOp(D.n, D.H)
    N.terms = [dict() if k == 0 else dict(row) for k, row in enumerate(D.terms)]
    N = N.scale(-1.0)
    v = list(u)
    for _ in range(D.H):
        v = hjet_add(u, apply_to_hjet(N, v, ev))
    return v


# ---- bidifferential operators ------------------------------------------------------

class LocalStar:
    """sum_k h^k sum c(x) d^a f d^b g, stored as per-order lists of
    (coefficient, a, b)."""

    def __init__(self, n, H, terms, name="star"):
        self.n = n
        self.H = H
        self.name = name
        self.terms = [list(terms.get(k, [])) for k in range(H + 1)]

    @classmethod
    def moyal(cls, n, H, bivector, name="moyal"):
        """Moyal product exp((h/2) P^{ij} d_i (x) d_j) for a constant bivector
        given as {(i, j): value} with i < j (1-based)."""
        P = {}
        for (i, j), v in bivector.items():
            P[(i, j)] = float(v)
            P[(j, i)] = -float(v)
        terms = {}
        for k in range(H + 1):
            acc = {}
            for pairs in iproduct(P.items(), repeat=k):
                a = [0] * n
                b = [0] * n
                w = 1.0
                for (i, j), v in pairs:
                    a[i - 1] += 1
                    b[j - 1] += 1
                    w *= v
                key = (tuple(a), tuple(b))
                acc[key] = acc.get(key, 0.0) + w / (factorial(k) * 2 ** k)
            terms[k] = [(lift(v), a, b) for (a, b), v in acc.items() if v != 0.0]
        return cls(n, H, terms, name)

    def max_derivative(self):
        return max((max(sum(a), sum(b)) for row in self.terms for _, a, b in row), default=0)


def apply_star(S, u, v, ev):
    """Bidifferential product of two h-jets, truncated at S.H."""
    H = S.H
    out = [None] * (H + 1)
    for k, row in enumerate(S.terms):
        for i, ui in enumerate(u):
            if ui is None:
                continue
            for j, vj in enumerate(v):
                if vj is None or k + i + j > H:
                    continue
                for c, a, b in row:
                    if ui.order < sum(a) or vj.order < sum(b):
                        raise UsageError("jet order exhausted; increase the jet order K")
                    t = ui.derivative(a) * vj.derivative(b)
                    t = ev.eval(c, t.order) * t
                    out[k + i + j] = _acc(out[k + i + j], t)
    return out
