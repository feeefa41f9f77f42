"""Exact coefficient arithmetic: rationals, polynomials in h, and polynomials
in x1..xn with coefficients in Q[h].

Rationals are :class:`fractions.Fraction` (plain ``int`` is accepted wherever a
rational is expected).  A :class:`Poly` stores its terms flat, keyed by
``(exponents, h_power)``, so the h-grading of every term is available without
touching the x-exponents.

The global monomial order is graded reverse lexicographic with the variable
priority ``x1 < x2 < ... < xn``: ties in total degree are broken by the
exponent of ``x1`` (smaller wins), then ``x2``, and so on.  Under this order
the leading monomial of ``x1^2 + x2^2 + x3^2`` is ``x3^2``.
"""

from fractions import Fraction
from numbers import Rational as _RationalABC

from .errors import UsageError

Rational = Fraction


def as_rational(value):
    """Coerce ints, Fractions and exact decimal strings to a rational."""
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, _RationalABC):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, str):
        return as_rational(Fraction(value.strip()))
    raise UsageError(f"not an exact rational: {value!r}")


def format_rational(q):
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def monomial_key(exps):
    """Sort key for the global grevlex order (larger key = larger monomial)."""
    return (sum(exps), tuple(-e for e in exps))


class HPoly:
    """Polynomial in the formal parameter h with rational coefficients.

    ``coeffs[k]`` is the coefficient of ``h^k``; trailing zeros are stripped so
    the zero polynomial has ``coeffs == ()``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        if isinstance(coeffs, (int, Fraction)):
            coeffs = (coeffs,)
        cs = [as_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def h(cls):
        return cls((0, 1))

    def degree(self):
        return len(self.coeffs) - 1

    def order(self):
        """Lowest power of h with a nonzero coefficient (None for zero)."""
        for k, c in enumerate(self.coeffs):
            if c:
                return k
        return None

    def is_zero(self):
        return not self.coeffs

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    def __call__(self, value):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * value + c
        return acc

    def _coerce(self, other):
        if isinstance(other, HPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return HPoly((other,))
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        return HPoly(self[k] + other[k] for k in range(n))

    __radd__ = __add__

    def __neg__(self):
        return HPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return HPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return HPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = HPoly((1,))
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return False
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(("HPoly", self.coeffs))

    def __repr__(self):
        return f"HPoly({str(self)!r})"

    def __str__(self):
        return str(Poly.from_hpoly(0, self))


class Poly:
    """Multivariate polynomial in x1..xn over Q[h].

    Values are immutable.  ``n`` is the number of x-variables; arithmetic
    between polynomials of different ``n`` is a usage error.
    """

    __slots__ = ("n", "_t", "_hash")

    def __init__(self, n, terms=None):
        self.n = n
        t = {}
        if terms:
            for (exps, k), c in terms.items():
                if c:
                    if len(exps) != n:
                        raise UsageError(f"exponent {exps} does not have length {n}")
                    t[(tuple(exps), k)] = as_rational(c)
        self._t = t
        self._hash = None

    @classmethod
    def _raw(cls, n, t):
        # t must already be clean: tuple keys, no zero values
        p = cls.__new__(cls)
        p.n = n
        p._t = t
        p._hash = None
        return p

    @classmethod
    def zero(cls, n):
        return cls._raw(n, {})

    @classmethod
    def const(cls, n, c):
        c = as_rational(c)
        return cls._raw(n, {((0,) * n, 0): c} if c else {})

    @classmethod
    def one(cls, n):
        return cls.const(n, 1)

    @classmethod
    def var(cls, n, i):
        """The coordinate x_i (1-based)."""
        if not 1 <= i <= n:
            raise UsageError(f"variable index {i} out of range 1..{n}")
        e = [0] * n
        e[i - 1] = 1
        return cls._raw(n, {(tuple(e), 0): 1})

    @classmethod
    def hvar(cls, n):
        return cls._raw(n, {((0,) * n, 1): 1})

    @classmethod
    def monomial(cls, exps, coeff=1, hpow=0):
        exps = tuple(exps)
        coeff = as_rational(coeff)
        return cls._raw(len(exps), {(exps, hpow): coeff} if coeff else {})

    @classmethod
    def from_hpoly(cls, n, hp):
        z = (0,) * n
        return cls._raw(n, {(z, k): c for k, c in enumerate(hp.coeffs) if c})

    @classmethod
    def from_terms(cls, n, terms):
        """Build from a mapping ``exponents -> HPoly`` (or rational)."""
        t = {}
        for exps, c in terms.items():
            if not isinstance(c, HPoly):
                c = HPoly((c,))
            for k, v in enumerate(c.coeffs):
                if v:
                    t[(tuple(exps), k)] = v
        return cls(n, t)

    # ---- inspection -------------------------------------------------

    @property
    def terms(self):
        """Mapping from exponent tuple to its :class:`HPoly` coefficient."""
        grouped = {}
        for (exps, k), c in self._t.items():
            grouped.setdefault(exps, {})[k] = c
        out = {}
        for exps, d in grouped.items():
            top = max(d)
            out[exps] = HPoly(d.get(k, 0) for k in range(top + 1))
        return out

    def flat_items(self):
        """Iterate over ``((exponents, h_power), coefficient)``."""
        return self._t.items()

    def coeff(self, exps, hpow=0):
        return self._t.get((tuple(exps), hpow), 0)

    def is_zero(self):
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def __len__(self):
        return len(self._t)

    def degree(self):
        """Total x-degree (-1 for the zero polynomial)."""
        return max((sum(e) for e, _ in self._t), default=-1)

    def h_degree(self):
        return max((k for _, k in self._t), default=-1)

    def h_order(self):
        """Lowest h-power present (None for zero)."""
        return min((k for _, k in self._t), default=None)

    def is_h_free(self):
        return all(k == 0 for _, k in self._t)

    def monomials(self):
        return sorted({e for e, _ in self._t}, key=monomial_key, reverse=True)

    def h_part(self, k):
        """Coefficient of h^k as an h-free polynomial."""
        return Poly._raw(self.n, {(e, 0): c for (e, j), c in self._t.items() if j == k})

    def truncate_h(self, top):
        """Drop all terms with h-power greater than ``top``."""
        return Poly._raw(self.n, {key: c for key, c in self._t.items() if key[1] <= top})

    def shift_h(self, k):
        return Poly._raw(self.n, {(e, j + k): c for (e, j), c in self._t.items()})

    def homogeneous_part(self, d):
        return Poly._raw(self.n, {key: c for key, c in self._t.items() if sum(key[0]) == d})

    def leading_monomial(self):
        if not self._t:
            return None
        return max((e for e, _ in self._t), key=monomial_key)

    def at_h(self, value):
        """Substitute a rational value for h."""
        t = {}
        for (e, k), c in self._t.items():
            t[e] = t.get(e, 0) + c * Fraction(value) ** k
        return Poly(self.n, {(e, 0): c for e, c in t.items()})

    # ---- arithmetic -------------------------------------------------

    def _check(self, other):
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                return Poly.const(self.n, other)
            if isinstance(other, HPoly):
                return Poly.from_hpoly(self.n, other)
            raise UsageError(f"cannot combine Poly with {type(other).__name__}")
        if other.n != self.n:
            raise UsageError(f"variable-count mismatch: {self.n} vs {other.n}")
        return other

    def __add__(self, other):
        other = self._check(other)
        t = dict(self._t)
        for key, c in other._t.items():
            v = t.get(key, 0) + c
            if v:
                t[key] = v
            else:
                t.pop(key, None)
        return Poly._raw(self.n, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(self.n, {key: -c for key, c in self._t.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = as_rational(c)
        if not c:
            return Poly.zero(self.n)
        return Poly._raw(self.n, {key: v * c for key, v in self._t.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._check(other)
        t = {}
        for (e1, k1), c1 in self._t.items():
            for (e2, k2), c2 in other._t.items():
                key = (tuple(a + b for a, b in zip(e1, e2)), k1 + k2)
                t[key] = t.get(key, 0) + c1 * c2
        return Poly._raw(self.n, {key: c for key, c in t.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise UsageError("polynomial powers need a nonnegative integer exponent")
        out = Poly.one(self.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def partial(self, i):
        if not 1 <= i <= self.n:
            raise UsageError(f"variable index {i} out of range 1..{self.n}")
        j = i - 1
        t = {}
        for (e, k), c in self._t.items():
            if e[j]:
                e2 = e[:j] + (e[j] - 1,) + e[j + 1:]
                t[(e2, k)] = c * e[j]
        return Poly._raw(self.n, t)

    def substitute(self, values):
        """Substitute rationals for some variables; ``values`` maps 1-based
        index to value.  The variable count is unchanged (exponent set to 0)."""
        t = {}
        for (e, k), c in self._t.items():
            e2 = list(e)
            for i, v in values.items():
                if e2[i - 1]:
                    c = c * Fraction(v) ** e2[i - 1]
                    e2[i - 1] = 0
            key = (tuple(e2), k)
            t[key] = t.get(key, 0) + c
        return Poly._raw(self.n, {key: c for key, c in t.items() if c})

    def compose(self, images):
        """Substitute polynomials ``images[i]`` (over a common ring) for x_{i+1}."""
        if len(images) != self.n:
            raise UsageError("need one image per variable")
        m = images[0].n if images else 0
        out = Poly.zero(m)
        powers = {}
        for (e, k), c in self._t.items():
            term = Poly._raw(m, {((0,) * m, k): c})
            for i, a in enumerate(e):
                if a:
                    key = (i, a)
                    if key not in powers:
                        powers[key] = images[i] ** a
                    term = term * powers[key]
            out = out + term
        return out

    def embed(self, n):
        """Same polynomial viewed in ``n >= self.n`` variables."""
        pad = (0,) * (n - self.n)
        return Poly._raw(n, {(e + pad, k): c for (e, k), c in self._t.items()})

    # ---- comparison / printing --------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Poly.const(self.n, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.n == other.n and self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._t.items())))
        return self._hash

    def sorted_items(self):
        return sorted(self._t.items(), key=lambda kv: (monomial_key(kv[0][0]), -kv[0][1]), reverse=True)

    def to_str(self, names=None):
        if names is None:
            names = [f"x{i + 1}" for i in range(self.n)]
        if not self._t:
            return "0"
        parts = []
        for (e, k), c in self.sorted_items():
            factors = []
            if k == 1:
                factors.append("h")
            elif k > 1:
                factors.append(f"h^{k}")
            for i, a in enumerate(e):
                if a == 1:
                    factors.append(names[i])
                elif a > 1:
                    factors.append(f"{names[i]}^{a}")
            mag = abs(Fraction(c))
            if factors and mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([format_rational(mag)] + factors)
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    def __str__(self):
        return self.to_str()

    def __repr__(self):
        return f"Poly({self.n}, {self.to_str()!r})"


def _same_n(a, b):
    if not isinstance(a, Poly) or not isinstance(b, Poly):
        raise UsageError("expected Poly operands")
    if a.n != b.n:
        raise UsageError(f"variable-count mismatch: {a.n} vs {b.n}")


def poly_add(a, b):
    _same_n(a, b)
    return a + b


def poly_mul(a, b):
    _same_n(a, b)
    return a * b


def poly_partial(f, i):
    return f.partial(i)
