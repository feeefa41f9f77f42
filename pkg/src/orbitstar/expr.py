"""Expression parsing for polynomials and smooth-function coefficients.

Grammar (whitespace ignored)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | NAME | NAME "(" expr ")" | "(" expr ")"

``^`` binds tighter than unary minus on its left (``-x^2 == -(x^2)``) and its
exponent must evaluate to a nonnegative integer literal.  Errors carry the
byte offset of the offending token.
"""

import re
from fractions import Fraction

from .coeff import Poly
from .errors import ParseError

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?|\.\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text):
    tokens = []
    pos = 0
    raw = text.encode()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.end() == pos:
            break
        start = m.start(m.lastindex)
        offset = len(text[:start].encode())
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), offset))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), offset))
        else:
            tokens.append(("op", m.group(3), offset))
        pos = m.end()
    tokens.append(("end", "", len(raw)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            raise ParseError(f"expected '{op}'", tok[2])
        return tok

    def parse(self):
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0)
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected token {tok[1]!r}", tok[2])
        return node

    def expr(self):
        node = self.term()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "+-":
                self.take()
                rhs = self.term()
                node = ("add" if tok[1] == "+" else "sub", node, rhs, tok[2])
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in "*/":
                self.take()
                rhs = self.unary()
                node = ("mul" if tok[1] == "*" else "div", node, rhs, tok[2])
            else:
                return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            inner = self.unary()
            return inner if tok[1] == "+" else ("neg", inner, None, tok[2])
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "^":
            self.take()
            exp_tok = self.peek()
            exponent = _constant_value(self.unary())
            if exponent is None or Fraction(exponent).denominator != 1:
                raise ParseError("exponent must be an integer literal", exp_tok[2])
            if exponent < 0:
                raise ParseError("negative exponent", exp_tok[2])
            return ("pow", base, int(exponent), tok[2])
        return base

    def atom(self):
        tok = self.take()
        kind, val, off = tok
        if kind == "num":
            return ("num", Fraction(val), None, off)
        if kind == "name":
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "(":
                self.take()
                arg = self.expr()
                self.expect(")")
                return ("call", val, arg, off)
            return ("name", val, None, off)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            raise ParseError("unexpected end of expression", off)
        raise ParseError(f"unexpected token {val!r}", off)


def _constant_value(node):
    kind = node[0]
    if kind == "num":
        return node[1]
    if kind == "neg":
        v = _constant_value(node[1])
        return None if v is None else -v
    return None


def parse_tree(text):
    """Parse ``text`` into a tuple-based syntax tree."""
    return _Parser(text).parse()


def variable_table(n, aliases=None):
    table = {f"x{i + 1}": i + 1 for i in range(n)}
    if aliases:
        for i, a in enumerate(aliases):
            table[a] = i + 1
    return table


def parse_expr(text, n, aliases=None):
    """Parse a polynomial in x1..xn (plus ``h``) into an exact :class:`Poly`.

    ``aliases`` optionally lists one extra name per variable (e.g. ``x, y, z``).
    """
    names = variable_table(n, aliases)
    return _to_poly(parse_tree(text), n, names)


def _to_poly(node, n, names):
    kind, a, b, off = node
    if kind == "num":
        return Poly.const(n, a)
    if kind == "name":
        if a == "h":
            return Poly.hvar(n)
        if a in names:
            return Poly.var(n, names[a])
        raise ParseError(f"unknown variable {a!r}", off)
    if kind == "call":
        raise ParseError(f"function {a!r} not allowed in polynomial expressions", off)
    if kind == "neg":
        return -_to_poly(a, n, names)
    if kind == "pow":
        return _to_poly(a, n, names) ** b
    lhs = _to_poly(a, n, names)
    rhs = _to_poly(b, n, names)
    if kind == "add":
        return lhs + rhs
    if kind == "sub":
        return lhs - rhs
    if kind == "mul":
        return lhs * rhs
    if kind == "div":
        if rhs.is_zero():
            raise ParseError("division by zero", off)
        if rhs.degree() != 0 or rhs.h_degree() != 0:
            raise ParseError("division only by nonzero rational constants", off)
        return lhs.scale(1 / Fraction(rhs.coeff((0,) * n)))
    raise ParseError(f"unsupported construct {kind}", off)
