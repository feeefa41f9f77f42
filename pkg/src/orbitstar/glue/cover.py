"""Toy chart covers of R^n and the partition-of-unity gluing of local products.

Charts are open boxes (``None`` marks an infinite side).  On chart r the
glued product is

    f * g = A_r( A_r^{-1} f  *_r  A_r^{-1} g ),   A_r = sum_s phi_s T_sr,

with T_rr = Id.  Outside the overlaps A_r = Id, so the branch-by-branch
description of the glued product is the same formula.
"""

from math import ceil

from ..errors import DomainError, UsageError
from .diffop import (DiffOp, LocalStar, apply_inverse, apply_star, apply_to_hjet,
                     exp_diffop, hjet_of, invert_diffop)
from .jets import jet_space
from .smooth import ONE, Evaluator, add, coord, flat, lift, mul, recip


class Chart:
    def __init__(self, name, box):
        self.name = name
        self.box = [(None if lo is None else float(lo), None if hi is None else float(hi))
                    for lo, hi in box]
        for lo, hi in self.box:
            if lo is not None and hi is not None and not lo < hi:
                raise UsageError(f"chart {name}: empty side ({lo}, {hi})")

    @property
    def n(self):
        return len(self.box)

    def contains(self, x):
        return all((lo is None or v > lo) and (hi is None or v < hi)
                   for v, (lo, hi) in zip(x, self.box))

    def __repr__(self):
        return f"Chart({self.name!r}, {self.box})"


def intersect_boxes(boxes):
    """Componentwise intersection, or None if empty."""
    out = []
    for sides in zip(*boxes):
        los = [lo for lo, _ in sides if lo is not None]
        his = [hi for _, hi in sides if hi is not None]
        lo = max(los) if los else None
        hi = min(his) if his else None
        if lo is not None and hi is not None and lo >= hi:
            return None
        out.append((lo, hi))
    return out


def margin_weights(charts, margin):
    """Raw weights vanishing (with all derivatives) within ``margin`` of every
    finite side of each box."""
    out = []
    for ch in charts:
        factors = []
        for i, (lo, hi) in enumerate(ch.box, start=1):
            if lo is not None:
                factors.append(flat(coord(i) - (lo + margin)))
            if hi is not None:
                factors.append(flat((hi - margin) - coord(i)))
        out.append(mul(*factors) if factors else ONE)
    return out


class ChartCover:
    """Charts, local products, transitions and a partition of unity.

    ``transitions`` maps (s, r) (0-based) to T_sr, the operator taking
    chart-r functions to chart-s functions.  Missing reverse directions are
    filled in with :func:`invert_diffop`.
    """

    def __init__(self, charts, stars, transitions, weights, H, K, name="cover", window=3.0):
        self.name = name
        self.charts = list(charts)
        if not self.charts:
            raise UsageError("a cover needs at least one chart")
        self.n = self.charts[0].n
        self.H = H
        self.K = K
        self.window = float(window)
        if isinstance(stars, LocalStar):
            stars = [stars] * len(self.charts)
        self.stars = list(stars)
        if len(self.stars) != len(self.charts) or len(weights) != len(self.charts):
            raise UsageError("need one local product and one weight per chart")
        self.weights = [lift(w) for w in weights]
        self.total_weight = add(*self.weights)
        inv = recip(self.total_weight)
        self.partition = [mul(w, inv) for w in self.weights]
        self.T = {}
        for (s, r), D in transitions.items():
            self._check_op(D, f"T_{s + 1}{r + 1}")
            self.T[(s, r)] = D
        for (s, r) in list(self.T):
            if (r, s) not in self.T:
                self.T[(r, s)] = invert_diffop(self.T[(s, r)])
        for r, s in self.overlaps():
            if (s, r) not in self.T:
                raise UsageError(f"no transition between overlapping charts {r + 1} and {s + 1}")
        self._A = {}
        need = self.required_order()
        if K < need:
            raise UsageError(f"jet order K={K} below the reachable derivative order {need}")

    def _check_op(self, D, label):
        if D.n != self.n or D.H != self.H:
            raise UsageError(f"{label}: operator has n={D.n}, H={D.H}; cover has n={self.n}, H={self.H}")
        if not D.is_identity_at_zero():
            raise UsageError(f"{label} is not Id mod h")

    # geometry ---------------------------------------------------------------------

    def overlaps(self):
        out = []
        for r in range(len(self.charts)):
            for s in range(r + 1, len(self.charts)):
                if intersect_boxes([self.charts[r].box, self.charts[s].box]) is not None:
                    out.append((r, s))
        return out

    def triples(self):
        out = []
        m = len(self.charts)
        for r in range(m):
            for s in range(m):
                for t in range(m):
                    if len({r, s, t}) < 2:
                        continue
                    if intersect_boxes([self.charts[i].box for i in (r, s, t)]) is not None:
                        out.append((r, s, t))
        return out

    def charts_at(self, x):
        return [r for r, ch in enumerate(self.charts) if ch.contains(x)]

    def in_domain(self, x):
        """Inside some chart and inside the support of the partition."""
        return bool(self.charts_at(x)) and self.total_weight.at(x) > 0.0

    def transition(self, s, r):
        if s == r:
            return DiffOp.identity(self.n, self.H)
        try:
            return self.T[(s, r)]
        except KeyError:
            raise UsageError(f"charts {r + 1} and {s + 1} do not overlap")

    # operators --------------------------------------------------------------------

    def required_order(self):
        """Jet order consumed by one glued product at h^H."""
        rate = 0.0
        ops = list(self.T.values())
        for D in ops:
            for k in range(1, self.H + 1):
                rate = max(rate, D.max_derivative(k) / k)
        for S in self.stars:
            for k in range(1, self.H + 1):
                m = max((max(sum(a), sum(b)) for _, a, b in S.terms[k]), default=0)
                rate = max(rate, m / k)
        # A^{-1}, the local product and A each consume at most `rate` per h
        return int(ceil(rate * self.H))

    def build_A(self, r):
        """phi_r Id + sum_{s != r} phi_s T_sr, with the h^0 slot set to Id."""
        hit = self._A.get(r)
        if hit is not None:
            return hit
        A = DiffOp.identity(self.n, self.H)
        for s in range(len(self.charts)):
            if s == r or (min(r, s), max(r, s)) not in self.overlaps():
                continue
            T = self.transition(s, r)
            for k in range(1, self.H + 1):
                for a, c in T.terms[k].items():
                    v = mul(self.partition[s], c)
                    prev = A.terms[k].get(a)
                    A.terms[k][a] = v if prev is None else add(prev, v)
        self._A[r] = A
        return A

    def evaluator(self, x, order=None, extra=0):
        x = tuple(float(v) for v in x)
        K = self.K if order is None else order
        return Evaluator(jet_space(self.n, K + extra), x)

    def glued_hjet(self, u, v, ev, r):
        A = self.build_A(r)
        a = apply_inverse(A, u, ev)
        b = apply_inverse(A, v, ev)
        return apply_to_hjet(A, apply_star(self.stars[r], a, b, ev), ev)

    def pick_chart(self, x):
        rs = self.charts_at(x)
        if not rs:
            raise DomainError(f"point {tuple(x)} is outside every chart")
        if self.total_weight.at(x) <= 0.0:
            raise DomainError(f"point {tuple(x)} is outside the support of the partition")
        return rs[0]


def glued_star(cover, f, g, x, chart=None, ev=None):
    """Values of the glued product at x, one per h-order 0..H.

    ``f`` and ``g`` are SmoothFuncs or h-jets built on ``ev``."""
    x = tuple(float(v) for v in x)
    r = cover.pick_chart(x) if chart is None else chart
    if not cover.charts[r].contains(x):
        raise DomainError(f"point {x} is outside chart {r + 1}")
    if ev is None:
        ev = cover.evaluator(x)
    u = hjet_of(f, ev, ev.space.K, cover.H)
    v = hjet_of(g, ev, ev.space.K, cover.H)
    return [0.0 if j is None else j.value for j in cover.glued_hjet(u, v, ev, r)]


def glued_star_hjet(cover, f, g, ev, chart=None):
    """As :func:`glued_star` but returning the h-jet (for iterated products)."""
    r = cover.pick_chart(ev.x) if chart is None else chart
    u = hjet_of(f, ev, ev.space.K, cover.H)
    v = hjet_of(g, ev, ev.space.K, cover.H)
    return cover.glued_hjet(u, v, ev, r)


def transition_from_generator(n, H, generator, extra=None):
    """exp(X) + extra, where X and extra are DiffOps or term dicts
    ``{h_order: {multi-index: coefficient}}``."""
    X = generator if isinstance(generator, DiffOp) else DiffOp(n, H, generator)
    T = exp_diffop(X)
    if extra is not None:
        T = T + (extra if isinstance(extra, DiffOp) else DiffOp(n, H, extra))
    return T
