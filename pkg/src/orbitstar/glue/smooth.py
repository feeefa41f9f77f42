"""Expression trees for smooth coefficient functions, evaluated as jets.

Primitives: constants, coordinates, sums, products, integer powers, exp,
reciprocal (guarded), the one-sided flat function flat(u) = exp(-1/u) for
u > 0 (0 otherwise), and bump(t) = flat(1 - t^2).  ``Deriv`` is a lazy
partial derivative: it is evaluated by computing its argument to a higher
jet order and differentiating the jet, so no symbolic differentiation is
needed.
"""

from fractions import Fraction
from math import exp, factorial

from ..errors import DomainError, ParseError, UsageError
from ..expr import parse_tree, variable_table
from .jets import jet_space

_RECIP_GUARD = 1e-300


class SmoothFunc:
    """Base node; instances are immutable and shared freely."""

    __slots__ = ()

    # construction helpers
    def __add__(self, other):
        return add(self, lift(other))

    def __radd__(self, other):
        return add(lift(other), self)

    def __sub__(self, other):
        return add(self, neg(lift(other)))

    def __rsub__(self, other):
        return add(lift(other), neg(self))

    def __mul__(self, other):
        return mul(self, lift(other))

    def __rmul__(self, other):
        return mul(lift(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, k):
        return power(self, k)

    def __truediv__(self, other):
        other = lift(other)
        if isinstance(other, Const):
            if other.value == 0:
                raise DomainError("division by zero constant")
            return mul(self, Const(1.0 / other.value))
        return mul(self, recip(other))

    def jet(self, x, order, space=None):
        """Jet of this function at ``x``."""
        x = tuple(float(v) for v in x)
        if space is None:
            space = jet_space(len(x), order + derivative_depth(self))
        return Evaluator(space, x).eval(self, order)

    def at(self, x):
        """Value at the point ``x``."""
        return self.jet(x, 0).value

    def is_zero_const(self):
        return False


class Const(SmoothFunc):
    __slots__ = ("value_",)

    def __init__(self, value):
        self.value_ = float(value)

    @property
    def value(self):
        return self.value_

    def is_zero_const(self):
        return self.value_ == 0.0

    def __repr__(self):
        return f"Const({self.value_!r})"


class Coord(SmoothFunc):
    __slots__ = ("i",)

    def __init__(self, i):
        self.i = i

    def __repr__(self):
        return f"x{self.i}"


class Add(SmoothFunc):
    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = tuple(terms)

    def __repr__(self):
        return "(" + " + ".join(map(repr, self.terms)) + ")"


class Mul(SmoothFunc):
    __slots__ = ("factors",)

    def __init__(self, factors):
        self.factors = tuple(factors)

    def __repr__(self):
        return "*".join(map(repr, self.factors))


class Pow(SmoothFunc):
    __slots__ = ("base", "k")

    def __init__(self, base, k):
        self.base = base
        self.k = k

    def __repr__(self):
        return f"{self.base!r}^{self.k}"


class _Unary(SmoothFunc):
    __slots__ = ("arg",)
    name = "?"

    def __init__(self, arg):
        self.arg = arg

    def __repr__(self):
        return f"{self.name}({self.arg!r})"


class Exp(_Unary):
    __slots__ = ()
    name = "exp"


class Recip(_Unary):
    __slots__ = ()
    name = "recip"


class Flat(_Unary):
    __slots__ = ()
    name = "flat"


class Bump(_Unary):
    __slots__ = ()
    name = "bump"


class Deriv(SmoothFunc):
    __slots__ = ("expr", "beta")

    def __init__(self, expr, beta):
        self.expr = expr
        self.beta = tuple(beta)

    def __repr__(self):
        return f"D{list(self.beta)}({self.expr!r})"


ZERO = Const(0.0)
ONE = Const(1.0)


def lift(v):
    if isinstance(v, SmoothFunc):
        return v
    if isinstance(v, (int, float, Fraction)):
        return Const(float(v))
    raise UsageError(f"cannot use {v!r} as a smooth function")


def const(v):
    return Const(float(v))


def coord(i):
    return Coord(i)


def add(*terms):
    flat = []
    c = 0.0
    for t in terms:
        t = lift(t)
        if isinstance(t, Const):
            c += t.value
        elif isinstance(t, Add):
            flat.extend(t.terms)
        else:
            flat.append(t)
    if c != 0.0 or not flat:
        flat.append(Const(c))
    return flat[0] if len(flat) == 1 else Add(flat)


def mul(*factors):
    flat = []
    c = 1.0
    for f in factors:
        f = lift(f)
        if isinstance(f, Const):
            c *= f.value
        elif isinstance(f, Mul):
            for g in f.factors:
                if isinstance(g, Const):
                    c *= g.value
                else:
                    flat.append(g)
        else:
            flat.append(f)
    if c == 0.0:
        return ZERO
    if c != 1.0 or not flat:
        flat.insert(0, Const(c))
    return flat[0] if len(flat) == 1 else Mul(flat)


def neg(f):
    return mul(Const(-1.0), f)


def power(f, k):
    if not isinstance(k, int) or k < 0:
        raise UsageError("powers must be nonnegative integers")
    if k == 0:
        return ONE
    if k == 1:
        return f
    if isinstance(f, Const):
        return Const(f.value ** k)
    return Pow(f, k)


def exp_(f):
    f = lift(f)
    return Const(exp(f.value)) if isinstance(f, Const) else Exp(f)


def recip(f):
    f = lift(f)
    if isinstance(f, Const):
        if abs(f.value) < _RECIP_GUARD:
            raise DomainError("reciprocal of zero")
        return Const(1.0 / f.value)
    return Recip(f)


def flat(f):
    return Flat(lift(f))


def bump(f):
    return Bump(lift(f))


def deriv(f, beta):
    beta = tuple(beta)
    if not any(beta):
        return f
    if isinstance(f, Const):
        return ZERO
    if isinstance(f, Deriv):
        return Deriv(f.expr, tuple(a + b for a, b in zip(f.beta, beta)))
    return Deriv(f, beta)


def derivative_depth(f, _memo=None):
    """Extra jet order needed to evaluate the ``Deriv`` nodes inside ``f``."""
    if _memo is None:
        _memo = {}
    key = id(f)
    if key in _memo:
        return _memo[key]
    if isinstance(f, Deriv):
        out = sum(f.beta) + derivative_depth(f.expr, _memo)
    elif isinstance(f, Add):
        out = max(derivative_depth(t, _memo) for t in f.terms)
    elif isinstance(f, Mul):
        out = max(derivative_depth(t, _memo) for t in f.factors)
    elif isinstance(f, Pow):
        out = derivative_depth(f.base, _memo)
    elif isinstance(f, _Unary):
        out = derivative_depth(f.arg, _memo)
    else:
        out = 0
    _memo[key] = out
    return out


class Evaluator:
    """Evaluates trees to jets at one base point, memoising per node."""

    def __init__(self, space, x):
        self.space = space
        self.x = tuple(float(v) for v in x)
        if len(self.x) != space.n:
            raise UsageError(f"point has {len(self.x)} coordinates, expected {space.n}")
        self.cache = {}

    def eval(self, f, order):
        if order > self.space.K:
            raise UsageError(f"jet order {order} exceeds the jet space order {self.space.K}")
        key = id(f)
        hit = self.cache.get(key)
        if hit is not None and hit[1].order >= order:
            return hit[1].truncate(order)
        jet = self._compute(f, order)
        self.cache[key] = (f, jet)  # keep f alive so id() stays unique
        return jet

    def _compute(self, f, order):
        sp, x = self.space, self.x
        if isinstance(f, Const):
            return sp.constant(x, order, f.value)
        if isinstance(f, Coord):
            if not 1 <= f.i <= sp.n:
                raise UsageError(f"coordinate x{f.i} out of range")
            return sp.coordinate(x, order, f.i)
        if isinstance(f, Add):
            out = self.eval(f.terms[0], order)
            for t in f.terms[1:]:
                out = out + self.eval(t, order)
            return out
        if isinstance(f, Mul):
            out = self.eval(f.factors[0], order)
            for t in f.factors[1:]:
                out = out * self.eval(t, order)
            return out
        if isinstance(f, Pow):
            b = self.eval(f.base, order)
            out = b
            for _ in range(f.k - 1):
                out = out * b
            return out
        if isinstance(f, Exp):
            u = self.eval(f.arg, order)
            v = exp(u.value)
            return u.compose([v / factorial(k) for k in range(order + 1)])
        if isinstance(f, Recip):
            u = self.eval(f.arg, order)
            v = u.value
            if abs(v) < _RECIP_GUARD:
                raise DomainError(f"reciprocal of zero at {x}")
            return u.compose([(-1) ** k / v ** (k + 1) for k in range(order + 1)])
        if isinstance(f, Flat):
            u = self.eval(f.arg, order)
            if u.value <= 0.0:
                return sp.zero(x, order)
            return _flat_of(u, order)
        if isinstance(f, Bump):
            t = self.eval(f.arg, order)
            if abs(t.value) >= 1.0:
                return sp.zero(x, order)
            return _flat_of(1.0 - t * t, order)
        if isinstance(f, Deriv):
            k = sum(f.beta)
            return self.eval(f.expr, order + k).derivative(f.beta)
        raise UsageError(f"unknown node {f!r}")


def _flat_of(u, order):
    v = u.value
    r = u.compose([(-1) ** k / v ** (k + 1) for k in range(order + 1)])
    e = -r
    w = exp(e.value)
    return e.compose([w / factorial(k) for k in range(order + 1)])


_FUNCTIONS = {"exp": exp_, "recip": recip, "flat": flat, "bump": bump}


def from_expr(text, n, aliases=None):
    """Build a SmoothFunc from an expression string.

    Allowed functions: exp, recip, flat, bump.  Division by a non-constant
    becomes multiplication by its reciprocal."""
    names = variable_table(n, aliases)
    return _build(parse_tree(text), names)


def _build(node, names):
    kind, a, b, off = node
    if kind == "num":
        return Const(float(a))
    if kind == "name":
        if a in names:
            return Coord(names[a])
        raise ParseError(f"unknown variable {a!r}", off)
    if kind == "call":
        fn = _FUNCTIONS.get(a)
        if fn is None:
            raise ParseError(f"unknown function {a!r}", off)
        return fn(_build(b, names))
    if kind == "neg":
        return neg(_build(a, names))
    if kind == "pow":
        return power(_build(a, names), b)
    lhs, rhs = _build(a, names), _build(b, names)
    if kind == "add":
        return lhs + rhs
    if kind == "sub":
        return lhs - rhs
    if kind == "mul":
        return lhs * rhs
    if kind == "div":
        try:
            return lhs / rhs
        except DomainError:
            raise ParseError("division by zero", off)
    raise ParseError(f"unsupported construct {kind}", off)


def from_poly(p):
    """SmoothFunc of an h-free exact polynomial."""
    if not p.is_h_free():
        raise UsageError("expected a polynomial without h")
    terms = []
    for (e, _), c in p.flat_items():
        factors = [Const(float(c))]
        for i, k in enumerate(e):
            if k:
                factors.append(power(Coord(i + 1), k))
        terms.append(mul(*factors))
    return add(*terms) if terms else ZERO
