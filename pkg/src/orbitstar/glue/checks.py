"""Numerical checks on chart covers: cocycle, chart consistency, glued
associativity, continuity across chart boundaries, tangentiality, and the
partition of unity itself.  Every check returns a :class:`GlueReport`."""

import numpy as np

from ..errors import UsageError
from .cover import intersect_boxes
from .diffop import (apply_to_hjet, compose_diffops, hjet_of, hjet_sub)
from .smooth import add, const, coord, exp_, mul

COCYCLE_TOL = 1e-10
CONSISTENCY_TOL = 1e-10
CHART_CHOICE_TOL = 1e-9
ASSOC_TOL = 1e-8
CONTINUITY_TOL = 1e-9
TANGENTIAL_TOL = 1e-10
PARTITION_TOL = 1e-12


class GlueReport:
    """Max absolute defect per h-order plus the worst sample."""

    def __init__(self, prop, tol, H, judged=None):
        self.prop = prop
        self.tol = tol
        self.per_order = [0.0] * (H + 1)
        # h-orders held to the tolerance; the others are only recorded
        self.judged = list(range(H + 1)) if judged is None else list(judged)
        self.worst = None
        self.samples = 0
        self.notes = []

    def record(self, defects, where):
        self.samples += 1
        for k, d in enumerate(defects):
            d = abs(float(d))
            if not np.isfinite(d):
                d = float("inf")
            if d > self.per_order[k]:
                self.per_order[k] = d
                if self.worst is None or d >= self.worst[0]:
                    self.worst = (d, k, where)

    @property
    def max_defect(self):
        return max(self.per_order)

    @property
    def passed(self):
        if self.samples == 0:
            return False
        if self.tol == 0.0:
            return all(self.per_order[k] == 0.0 for k in self.judged)
        return all(self.per_order[k] < self.tol for k in self.judged)

    def witness(self):
        if self.samples == 0:
            return "no sample points"
        parts = " ".join(f"h^{k}:{d:.3e}" for k, d in enumerate(self.per_order))
        if self.worst is not None and self.worst[0] > 0.0:
            d, k, where = self.worst
            parts += f" worst h^{k} at {where}"
        return parts

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{self.prop}\t{status}\t{self.witness()}"

    def table(self):
        rows = [f"# {self.prop}: tolerance {self.tol:.0e}, {self.samples} samples"]
        for k, d in enumerate(self.per_order):
            tag = "" if k in self.judged else "  (recorded only)"
            rows.append(f"#   h^{k}  max defect {d:.3e}{tag}")
        rows.extend(f"#   {n}" for n in self.notes)
        return "\n".join(rows)


def _fmt_point(x):
    return "(" + ", ".join(f"{v:.4f}" for v in x) + ")"


# ---- sampling -----------------------------------------------------------------------

def sample_box(rng, box, window, count, accept=None, fixed=None, max_tries=10000):
    """Uniform points in ``box`` clipped to [-window, window]^n, optionally
    filtered by ``accept`` and with some coordinates pinned (``fixed``
    maps 0-based index to value)."""
    lows, highs = [], []
    for lo, hi in box:
        lo = -window if lo is None else max(lo, -window)
        hi = window if hi is None else min(hi, window)
        if lo >= hi:
            raise UsageError("sampling window misses the region")
        lows.append(lo)
        highs.append(hi)
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise UsageError("could not find enough admissible sample points")
        x = rng.uniform(lows, highs)
        for i, v in (fixed or {}).items():
            x[i] = v
        x = tuple(float(v) for v in x)
        if accept is None or accept(x):
            out.append(x)
    return out


def overlap_points(cover, rng, count, fixed=None):
    """``count`` points in every pairwise overlap (or in the single chart)."""
    pairs = cover.overlaps() or [(0, 0)]
    out = []
    for r, s in pairs:
        box = intersect_boxes([cover.charts[r].box, cover.charts[s].box])
        if fixed:
            box = [b for b in box]
            for i, v in fixed.items():
                lo, hi = box[i]
                if (lo is not None and v <= lo) or (hi is not None and v >= hi):
                    raise UsageError("leaf misses the overlap")
        pts = sample_box(rng, box, cover.window, count, cover.in_domain, fixed)
        out.extend(((r, s), x) for x in pts)
    return out


def random_test_function(rng, n, degree=2):
    """Polynomial with coefficients in [-1, 1] plus an exponential term."""
    terms = [const(rng.uniform(-1, 1))]
    for i in range(1, n + 1):
        terms.append(mul(const(rng.uniform(-1, 1)), coord(i)))
    if degree >= 2:
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                terms.append(mul(const(rng.uniform(-1, 1)), coord(i), coord(j)))
    lin = add(*[mul(const(rng.uniform(-0.5, 0.5)), coord(i)) for i in range(1, n + 1)])
    terms.append(mul(const(rng.uniform(-1, 1)), exp_(lin)))
    return add(*terms)


# ---- operator checks ------------------------------------------------------------------

def cocycle_check(cover, points=20, seed=0):
    """T_ts T_sr = T_tr on triple overlaps and T_rs T_sr = Id on pairs."""
    rng = np.random.default_rng(seed)
    rep = GlueReport("cocycle", COCYCLE_TOL, cover.H)
    cases = [(r, s, t) for r, s, t in cover.triples() if t != s and s != r]
    for r, s, t in cases:
        box = intersect_boxes([cover.charts[i].box for i in (r, s, t)])
        for x in sample_box(rng, box, cover.window, points):
            f = random_test_function(rng, cover.n)
            ev = cover.evaluator(x)
            u = hjet_of(f, ev, cover.K, cover.H)
            lhs = apply_to_hjet(cover.transition(t, s), apply_to_hjet(cover.transition(s, r), u, ev), ev)
            rhs = apply_to_hjet(cover.transition(t, r), u, ev) if t != r else u
            rep.record(_values(hjet_sub(lhs, rhs)),
                       f"T{t + 1}{s + 1}*T{s + 1}{r + 1} x={_fmt_point(x)}")
    return rep


def chart_consistency_check(cover, points=20, seed=0):
    """A_r T_rt = A_t as composed operators, applied to random functions."""
    rng = np.random.default_rng(seed)
    rep = GlueReport("consistency", CONSISTENCY_TOL, cover.H)
    for r, t in cover.overlaps():
        for a, b in ((r, t), (t, r)):
            lhs_op = compose_diffops(cover.build_A(a), cover.transition(a, b))
            diff = lhs_op - cover.build_A(b)
            box = intersect_boxes([cover.charts[a].box, cover.charts[b].box])
            for x in sample_box(rng, box, cover.window, points, cover.in_domain):
                f = random_test_function(rng, cover.n)
                ev = cover.evaluator(x, extra=diff.depth())
                u = hjet_of(f, ev, cover.K, cover.H)
                rep.record(_values(apply_to_hjet(diff, u, ev)),
                           f"A{a + 1}*T{a + 1}{b + 1}-A{b + 1} x={_fmt_point(x)}")
    return rep


def chart_choice_check(cover, points=20, seed=0):
    """The glued product computed through each chart containing x agrees."""
    rng = np.random.default_rng(seed)
    rep = GlueReport("chart-choice", CHART_CHOICE_TOL, cover.H)
    for (r, s), x in overlap_points(cover, rng, points):
        f = random_test_function(rng, cover.n)
        g = random_test_function(rng, cover.n)
        ev = cover.evaluator(x)
        u = hjet_of(f, ev, cover.K, cover.H)
        v = hjet_of(g, ev, cover.K, cover.H)
        a = cover.glued_hjet(u, v, ev, r)
        b = cover.glued_hjet(u, v, ev, s)
        rep.record(_values(hjet_sub(a, b)), f"charts {r + 1},{s + 1} x={_fmt_point(x)}")
    return rep


def _values(u):
    return [0.0 if j is None else j.value for j in u]


# ---- product checks ------------------------------------------------------------------

def associativity_check(cover, points=20, seed=0):
    """(f*g)*k - f*(g*k) for the glued product, per h-order."""
    need = 2 * cover.required_order()
    if cover.K < need:
        raise UsageError(f"associativity needs jet order {need}, cover has K={cover.K}")
    rng = np.random.default_rng(seed)
    rep = GlueReport("assoc", ASSOC_TOL, cover.H)
    for (r, _), x in overlap_points(cover, rng, points):
        f, g, k = (random_test_function(rng, cover.n) for _ in range(3))
        ev = cover.evaluator(x)
        u, v, w = (hjet_of(q, ev, cover.K, cover.H) for q in (f, g, k))
        left = cover.glued_hjet(cover.glued_hjet(u, v, ev, r), w, ev, r)
        right = cover.glued_hjet(u, cover.glued_hjet(v, w, ev, r), ev, r)
        rep.record(_values(hjet_sub(left, right)), f"x={_fmt_point(x)}")
    return rep


def _boundary_faces(cover):
    """(r, s, axis, value, sign): a finite face of chart s inside chart r;
    ``sign`` points from outside s to inside s."""
    out = []
    for r, s in cover.overlaps():
        for a, b in ((r, s), (s, r)):
            box_b = cover.charts[b].box
            for i, (lo, hi) in enumerate(box_b):
                for val, sign in ((lo, 1.0), (hi, -1.0)):
                    if val is None:
                        continue
                    probe = list(intersect_boxes([cover.charts[a].box, box_b]))
                    lo_a, hi_a = cover.charts[a].box[i]
                    if (lo_a is not None and val <= lo_a) or (hi_a is not None and val >= hi_a):
                        continue
                    probe[i] = (val - 1e-9, val + 1e-9)
                    out.append((a, b, i, val, sign, probe))
    return out


def continuity_check(cover, points=20, seed=0, step=1e-4):
    """Straddling pairs across each face of a chart s lying inside chart r.

    Outside s (in r) the product is evaluated through chart r; just inside,
    through chart s.  The outside jet is Taylor-extrapolated across the
    face and compared with the inside value."""
    rng = np.random.default_rng(seed)
    rep = GlueReport("continuity", CONTINUITY_TOL, cover.H)
    for a, b, i, val, sign, probe in _boundary_faces(cover):
        pts = sample_box(rng, probe, cover.window, points,
                         lambda y: cover.in_domain(_shift(y, i, val - sign * step)))
        for y in pts:
            x_out = _shift(y, i, val - sign * step)
            x_in = _shift(y, i, val + sign * step)
            f = random_test_function(rng, cover.n)
            g = random_test_function(rng, cover.n)
            ev_out = cover.evaluator(x_out)
            outside = cover.glued_hjet(hjet_of(f, ev_out, cover.K, cover.H),
                                       hjet_of(g, ev_out, cover.K, cover.H), ev_out, a)
            ev_in = cover.evaluator(x_in)
            inside = _values(cover.glued_hjet(hjet_of(f, ev_in, cover.K, cover.H),
                                              hjet_of(g, ev_in, cover.K, cover.H), ev_in, b))
            delta = [0.0] * cover.n
            delta[i] = 2 * sign * step
            extrap = [0.0 if j is None else _taylor(j, delta) for j in outside]
            rep.record([p - q for p, q in zip(extrap, inside)],
                       f"face x{i + 1}={val} of chart {b + 1} at {_fmt_point(x_in)}")
    if not rep.samples:
        rep.notes.append("no chart face lies inside another chart")
    return rep


def _shift(y, i, v):
    y = list(y)
    y[i] = v
    return tuple(y)


def _taylor(jet, delta):
    """Evaluate the Taylor polynomial stored in ``jet`` at base + delta."""
    sp = jet.space
    d = np.asarray(delta, dtype=float)
    m = sp.size[jet.order]
    powers = np.prod(d[None, :] ** np.asarray(sp.indices[:m], dtype=float), axis=1)
    return float(np.dot(jet.c, powers))


def tangentiality_probe(cover, leaf, points=20, seed=0):
    """f = (x_i - c) g vanishes on the leaf x_i = c; so must f*g' and g'*f."""
    axis = int(leaf["coordinate"]) - 1
    c = float(leaf["value"])
    rng = np.random.default_rng(seed)
    rep = GlueReport("tangential", TANGENTIAL_TOL, cover.H)
    for (r, _), x in overlap_points(cover, rng, points, fixed={axis: c}):
        g = random_test_function(rng, cover.n)
        g2 = random_test_function(rng, cover.n)
        f = mul(add(coord(axis + 1), const(-c)), g)
        ev = cover.evaluator(x)
        u = hjet_of(f, ev, cover.K, cover.H)
        v = hjet_of(g2, ev, cover.K, cover.H)
        for side, (p, q) in (("f*g", (u, v)), ("g*f", (v, u))):
            rep.record(_values(cover.glued_hjet(p, q, ev, r)), f"{side} x={_fmt_point(x)}")
    return rep


# ---- partition -----------------------------------------------------------------------

def partition_check(cover, points=100, seed=0):
    """sum phi_r = 1 on the domain, and every phi_r (with its jet) vanishes on
    the faces of its own box."""
    rng = np.random.default_rng(seed)
    rep = GlueReport("partition", PARTITION_TOL, 0)
    union = [(None, None)] * cover.n
    for x in sample_box(rng, union, cover.window, points, cover.in_domain):
        ev = cover.evaluator(x, order=1)
        s = sum(ev.eval(p, 0).value for p in cover.partition)
        rep.record([s - 1.0], f"sum at {_fmt_point(x)}")
    for r, ch in enumerate(cover.charts):
        for i, (lo, hi) in enumerate(ch.box):
            for val in (lo, hi):
                if val is None:
                    continue
                box = list(ch.box)
                box[i] = (val - 1e-9, val + 1e-9)
                try:
                    pts = sample_box(rng, box, cover.window, 5, cover.in_domain,
                                     fixed={i: val})
                except UsageError:
                    continue
                for x in pts:
                    ev = cover.evaluator(x)
                    j = ev.eval(cover.partition[r], cover.K)
                    rep.record([float(np.max(np.abs(j.c)))], f"phi_{r + 1} on face x{i + 1}={val}")
    return rep


def partition_change_difference(cover, other, points=20, seed=0):
    """Glued products of two covers differing only in the partition.  The
    h^0 parts must agree exactly; higher orders are recorded, not judged."""
    rng = np.random.default_rng(seed)
    rep = GlueReport("partition-change", 0.0, cover.H, judged=[0])
    for (r, _), x in overlap_points(cover, rng, points):
        if not other.in_domain(x):
            continue
        f = random_test_function(rng, cover.n)
        g = random_test_function(rng, cover.n)
        ev = cover.evaluator(x)
        u = hjet_of(f, ev, cover.K, cover.H)
        v = hjet_of(g, ev, cover.K, cover.H)
        a = _values(cover.glued_hjet(u, v, ev, r))
        b = _values(other.glued_hjet(u, v, ev, r))
        rep.record([p - q for p, q in zip(a, b)], f"x={_fmt_point(x)}")
    return rep


CHECKS = {
    "cocycle": cocycle_check,
    "consistency": chart_consistency_check,
    "chart-choice": chart_choice_check,
    "assoc": associativity_check,
    "continuity": continuity_check,
    "partition": partition_check,
}
