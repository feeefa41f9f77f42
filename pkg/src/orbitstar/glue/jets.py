"""Truncated multivariate Taylor series (jets) with numpy coefficient arrays.

A jet of order k at a base point stores the Taylor coefficients
``d^a f(x) / a!`` for all multi-indices |a| <= k.  Multi-indices are listed
by increasing degree, so truncating to a lower order is a prefix slice.
"""

from functools import lru_cache
from itertools import combinations_with_replacement
from math import factorial

import numpy as np

from ..errors import UsageError


class JetSpace:
    """Index tables for jets in ``n`` variables up to order ``K``."""

    def __init__(self, n, K):
        self.n = n
        self.K = K
        idx = []
        for d in range(K + 1):
            block = []
            for combo in combinations_with_replacement(range(n), d):
                a = [0] * n
                for i in combo:
                    a[i] += 1
                block.append(tuple(a))
            block.sort(reverse=True)
            idx.extend(block)
        self.indices = idx
        self.pos = {a: k for k, a in enumerate(idx)}
        self.degree = np.array([sum(a) for a in idx])
        # size[k] = number of multi-indices of degree <= k
        self.size = [int(np.sum(self.degree <= k)) for k in range(K + 1)]
        self._build_products()
        self._build_derivatives()

    def _build_products(self):
        ia, ib, tgt, deg = [], [], [], []
        for p, a in enumerate(self.indices):
            da = sum(a)
            for q, b in enumerate(self.indices):
                if da + sum(b) > self.K:
                    continue
                c = tuple(x + y for x, y in zip(a, b))
                ia.append(p)
                ib.append(q)
                tgt.append(self.pos[c])
                deg.append(da + sum(b))
        order = np.argsort(np.array(deg), kind="stable")
        self.prod_a = np.array(ia, dtype=np.int64)[order]
        self.prod_b = np.array(ib, dtype=np.int64)[order]
        self.prod_t = np.array(tgt, dtype=np.int64)[order]
        degs = np.array(deg)[order]
        self.prod_count = [int(np.sum(degs <= k)) for k in range(self.K + 1)]

    def _build_derivatives(self):
        # d_i maps coefficient of a + e_i (times a_i + 1) to a
        self.deriv_src = []
        self.deriv_fac = []
        for i in range(self.n):
            src, fac = [], []
            for a in self.indices[: self.size[self.K - 1]] if self.K >= 1 else []:
                b = list(a)
                b[i] += 1
                src.append(self.pos[tuple(b)])
                fac.append(a[i] + 1)
            self.deriv_src.append(np.array(src, dtype=np.int64))
            self.deriv_fac.append(np.array(fac, dtype=float))

    def zero(self, x, order):
        return Jet(self, x, order, np.zeros(self.size[order]))

    def constant(self, x, order, value):
        c = np.zeros(self.size[order])
        c[0] = value
        return Jet(self, x, order, c)

    def coordinate(self, x, order, i):
        """Jet of x_i (1-based)."""
        c = np.zeros(self.size[order])
        c[0] = x[i - 1]
        if order >= 1:
            e = [0] * self.n
            e[i - 1] = 1
            c[self.pos[tuple(e)]] = 1.0
        return Jet(self, x, order, c)


@lru_cache(maxsize=None)
def jet_space(n, K):
    return JetSpace(n, K)


class Jet:
    __slots__ = ("space", "x", "order", "c")

    def __init__(self, space, x, order, coeffs):
        if order < 0:
            raise UsageError("jet order exhausted; increase the jet order K")
        self.space = space
        self.x = x
        self.order = order
        self.c = coeffs

    @property
    def value(self):
        return float(self.c[0])

    def coeff(self, a):
        p = self.space.pos.get(tuple(a))
        if p is None or p >= len(self.c):
            raise UsageError(f"multi-index {a} beyond jet order {self.order}")
        return float(self.c[p])

    def derivative_value(self, a):
        """d^a f at the base point."""
        f = 1
        for k in a:
            f *= factorial(k)
        return self.coeff(a) * f

    def truncate(self, order):
        if order > self.order:
            raise UsageError(f"cannot raise jet order {self.order} to {order}")
        if order == self.order:
            return self
        return Jet(self.space, self.x, order, self.c[: self.space.size[order]])

    def _align(self, other):
        k = min(self.order, other.order)
        n = self.space.size[k]
        return k, self.c[:n], other.c[:n]

    def __add__(self, other):
        if not isinstance(other, Jet):
            c = self.c.copy()
            c[0] += other
            return Jet(self.space, self.x, self.order, c)
        k, a, b = self._align(other)
        return Jet(self.space, self.x, k, a + b)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.space, self.x, self.order, -self.c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s):
        return Jet(self.space, self.x, self.order, self.c * s)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.scale(other)
        sp = self.space
        k, a, b = self._align(other)
        m = sp.prod_count[k]
        out = np.bincount(sp.prod_t[:m], weights=a[sp.prod_a[:m]] * b[sp.prod_b[:m]],
                          minlength=sp.size[k])
        return Jet(sp, self.x, k, out)

    __rmul__ = __mul__

    def is_zero(self):
        return not np.any(self.c)

    def partial(self, i):
        """d/dx_i (1-based); the order drops by one."""
        if self.order < 1:
            raise UsageError("jet order exhausted; increase the jet order K")
        sp = self.space
        k = self.order - 1
        m = sp.size[k]
        return Jet(sp, self.x, k, self.c[sp.deriv_src[i - 1][:m]] * sp.deriv_fac[i - 1][:m])

    def derivative(self, a):
        out = self
        for i, k in enumerate(a):
            for _ in range(k):
                out = out.partial(i + 1)
        return out

    def compose(self, taylor):
        """g(self) where ``taylor[k] = g^(k)(value) / k!`` for k <= order."""
        k = self.order
        du = self - self.value
        out = self.space.constant(self.x, k, taylor[k])
        for j in range(k - 1, -1, -1):
            out = out * du + taylor[j]
        return out

    def __repr__(self):
        return f"Jet(order={self.order}, value={self.value:.6g})"
