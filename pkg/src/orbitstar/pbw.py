"""The h-scaled enveloping algebra U_h in the ordered PBW basis.

Relations: X_j X_i = X_i X_j + h * sum_k c_ji^k X_k.  Because h and every
generator have weight one, each rewrite trades one unit of word length for
one power of h.  The internal product tables therefore store bare rational
coefficients and the h-power of a term is recovered as
``(input length) - (output length)``.

Elements are :class:`PBWElement` values keyed by ``(word, h_power)`` where
``word`` is a nondecreasing tuple of generator indices (1-based).
"""

from fractions import Fraction

from .coeff import HPoly, as_rational, format_rational
from .errors import UsageError


class PBWElement:
    __slots__ = ("_t", "_hash")

    def __init__(self, terms=None):
        t = {}
        if terms:
            for (w, k), c in terms.items():
                if c:
                    w = tuple(w)
                    if any(a > b for a, b in zip(w, w[1:])):
                        raise UsageError(f"word {w} is not nondecreasing")
                    t[(w, k)] = as_rational(c)
        self._t = t
        self._hash = None

    @classmethod
    def _raw(cls, t):
        e = cls.__new__(cls)
        e._t = t
        e._hash = None
        return e

    @classmethod
    def unit(cls):
        return cls._raw({((), 0): 1})

    @classmethod
    def zero(cls):
        return cls._raw({})

    @classmethod
    def generator(cls, i):
        return cls._raw({((i,), 0): 1})

    @classmethod
    def scalar(cls, hp):
        if not isinstance(hp, HPoly):
            hp = HPoly((hp,))
        return cls._raw({((), k): c for k, c in enumerate(hp.coeffs) if c})

    @classmethod
    def word(cls, w, coeff=1):
        """The basis element for a sorted word (sorted here if needed)."""
        return cls._raw({(tuple(sorted(w)), 0): as_rational(coeff)} if coeff else {})

    def flat_items(self):
        return self._t.items()

    @property
    def terms(self):
        """Mapping word -> HPoly."""
        grouped = {}
        for (w, k), c in self._t.items():
            grouped.setdefault(w, {})[k] = c
        return {w: HPoly(d.get(k, 0) for k in range(max(d) + 1)) for w, d in grouped.items()}

    def coeff(self, w, k=0):
        return self._t.get((tuple(w), k), 0)

    def is_zero(self):
        return not self._t

    def __bool__(self):
        return bool(self._t)

    def filtration_degree(self):
        return max((len(w) for w, _ in self._t), default=-1)

    def top_part(self):
        d = self.filtration_degree()
        return PBWElement._raw({key: c for key, c in self._t.items() if len(key[0]) == d})

    def h_part(self, k):
        return PBWElement._raw({(w, 0): c for (w, j), c in self._t.items() if j == k})

    def __add__(self, other):
        if not isinstance(other, PBWElement):
            other = PBWElement.scalar(other)
        t = dict(self._t)
        for key, c in other._t.items():
            v = t.get(key, 0) + c
            if v:
                t[key] = v
            else:
                t.pop(key, None)
        return PBWElement._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return PBWElement._raw({key: -c for key, c in self._t.items()})

    def __sub__(self, other):
        if not isinstance(other, PBWElement):
            other = PBWElement.scalar(other)
        return self + (-other)

    def scale(self, c):
        if isinstance(c, HPoly):
            t = {}
            for (w, k), v in self._t.items():
                for j, a in enumerate(c.coeffs):
                    if a:
                        key = (w, k + j)
                        t[key] = t.get(key, 0) + v * a
            return PBWElement._raw({key: v for key, v in t.items() if v})
        c = as_rational(c)
        if not c:
            return PBWElement.zero()
        return PBWElement._raw({key: v * c for key, v in self._t.items()})

    def __eq__(self, other):
        if not isinstance(other, PBWElement):
            return NotImplemented
        return self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    def to_str(self):
        if not self._t:
            return "0"
        items = sorted(self._t.items(), key=lambda kv: (-len(kv[0][0]), kv[0][0], kv[0][1]))
        parts = []
        for (w, k), c in items:
            factors = []
            if k == 1:
                factors.append("h")
            elif k > 1:
                factors.append(f"h^{k}")
            factors.extend(f"X{i}" for i in w)
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

    __str__ = to_str

    def __repr__(self):
        return f"PBWElement({self.to_str()!r})"


def _tables(A):
    t = A._cache.get("pbw")
    if t is None:
        t = A._cache["pbw"] = {"letter": {}, "word": {}}
    return t


def _check_word(w, A):
    for i in w:
        if not isinstance(i, int) or not 1 <= i <= A.n:
            raise UsageError(f"generator index {i!r} out of range 1..{A.n}")


def _mul_letter(A, w, j, memo):
    """Sorted word w times generator j, as {sorted word: coefficient}."""
    if not w or w[-1] <= j:
        return {w + (j,): 1}
    key = (w, j)
    hit = memo.get(key)
    if hit is not None:
        return hit
    a = w[-1]
    head = w[:-1]
    out = {}
    # w X_j = head X_a X_j = (head X_j) X_a + h * sum_k c_aj^k head X_k
    for u, c in _mul_letter(A, head, j, memo).items():
        for v, d in _mul_letter(A, u, a, memo).items():
            out[v] = out.get(v, 0) + c * d
    for k, c in A.brackets.get((a, j), {}).items():
        if c:
            for v, d in _mul_letter(A, head, k, memo).items():
                out[v] = out.get(v, 0) + c * d
    out = {v: c for v, c in out.items() if c}
    memo[key] = out
    return out


def word_product(A, u, v):
    """Product of two sorted words as {sorted word: coefficient}; the h-power
    of each output word is ``len(u) + len(v) - len(word)``."""
    tables = _tables(A)
    key = (u, v)
    hit = tables["word"].get(key)
    if hit is not None:
        return hit
    memo = tables["letter"]
    cur = {u: 1}
    for j in v:
        nxt = {}
        for w, c in cur.items():
            for x, d in _mul_letter(A, w, j, memo).items():
                nxt[x] = nxt.get(x, 0) + c * d
        cur = {w: c for w, c in nxt.items() if c}
    tables["word"][key] = cur
    return cur


def normal_order(w, A):
    """PBW expansion of the product X_{w1} ... X_{wk} in U_h."""
    w = tuple(w)
    _check_word(w, A)
    memo = _tables(A)["letter"]
    cur = {(): 1}
    for j in w:
        nxt = {}
        for u, c in cur.items():
            for x, d in _mul_letter(A, u, j, memo).items():
                nxt[x] = nxt.get(x, 0) + c * d
        cur = {u: c for u, c in nxt.items() if c}
    k = len(w)
    return PBWElement._raw({(u, k - len(u)): c for u, c in cur.items()})


def normal_order_rewrite(w, A):
    """Unmemoized reference normal ordering by repeatedly fixing the leftmost
    descent.  Returns ``(element, rewrite_steps)``."""
    w = tuple(w)
    _check_word(w, A)
    k = len(w)
    pending = {w: 1}
    done = {}
    steps = 0
    while pending:
        word, c = pending.popitem()
        if not c:
            continue
        pos = next((i for i in range(len(word) - 1) if word[i] > word[i + 1]), None)
        if pos is None:
            done[word] = done.get(word, 0) + c
            continue
        steps += 1
        a, b = word[pos], word[pos + 1]
        swapped = word[:pos] + (b, a) + word[pos + 2:]
        pending[swapped] = pending.get(swapped, 0) + c
        for kk, v in A.brackets.get((a, b), {}).items():
            if v:
                shorter = word[:pos] + (kk,) + word[pos + 2:]
                pending[shorter] = pending.get(shorter, 0) + c * v
    return PBWElement._raw({(u, k - len(u)): c for u, c in done.items() if c}), steps


def pbw_mul(a, b, A):
    """Associative product in U_h."""
    if not a._t or not b._t:
        return PBWElement.zero()
    out = {}
    for (u, ku), cu in a._t.items():
        for (v, kv), cv in b._t.items():
            base = len(u) + len(v)
            cc = cu * cv
            for w, d in word_product(A, u, v).items():
                key = (w, ku + kv + base - len(w))
                out[key] = out.get(key, 0) + cc * d
    return PBWElement._raw({key: c for key, c in out.items() if c})


def commutator(a, b, A):
    return pbw_mul(a, b, A) - pbw_mul(b, a, A)


def center_check(u, A):
    """True iff u commutes with every generator."""
    return all(commutator(u, PBWElement.generator(i), A).is_zero() for i in range(1, A.n + 1))


def symbol(u, n):
    """Top filtration component of ``u`` read as a commutative polynomial."""
    from .coeff import Poly

    d = u.filtration_degree()
    t = {}
    for (w, k), c in u.flat_items():
        if len(w) == d:
            e = [0] * n
            for i in w:
                e[i - 1] += 1
            t[(tuple(e), k)] = c
    return Poly(n, t)
