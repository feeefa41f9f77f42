"""Sparse exact linear algebra over Q.

Rows are dicts ``{variable: coefficient}``; variables are any hashable keys.
Elimination is incremental, so equations can be streamed in and an
inconsistency is detected as soon as it appears.
"""

from fractions import Fraction


class Inconsistent(Exception):
    def __init__(self, residual, tag=None):
        self.residual = residual
        self.tag = tag
        super().__init__(f"inconsistent linear system (residual {residual}, equation {tag!r})")


class SparseSystem:
    """Incremental row-echelon elimination.

    ``pivot_key`` ranks variables; the largest-ranked variable of each reduced
    row becomes its pivot.
    """

    def __init__(self, pivot_key=None):
        self.pivot_key = pivot_key
        self.pivots = {}
        self.order = []
        self.rank = 0
        self.equations = 0

    def _reduce(self, row, rhs):
        row = dict(row)
        pending = [v for v in row if v in self.pivots]
        while pending:
            v = pending.pop()
            c = row.pop(v, 0)
            if not c:
                continue
            prow, prhs = self.pivots[v]
            for w, a in prow.items():
                nv = row.get(w, 0) - c * a
                if nv:
                    if w not in row and w in self.pivots:
                        pending.append(w)
                    row[w] = nv
                else:
                    row.pop(w, None)
            rhs = rhs - c * prhs
        return row, rhs

    def add(self, row, rhs=0, tag=None):
        """Add ``sum(row[v] * v) == rhs``; raise :class:`Inconsistent` if it
        contradicts the equations seen so far."""
        self.equations += 1
        row = {v: c for v, c in row.items() if c}
        row, rhs = self._reduce(row, rhs)
        if not row:
            if rhs:
                raise Inconsistent(rhs, tag)
            return False
        pv = max(row, key=self.pivot_key) if self.pivot_key else max(row)
        inv = 1 / Fraction(row[pv])
        prow = {w: a * inv for w, a in row.items() if w != pv}
        self.pivots[pv] = (prow, rhs * inv)
        self.order.append(pv)
        self.rank += 1
        return True

    def solve(self):
        """A particular solution with all free variables set to zero."""
        value = {}
        for pv in reversed(self.order):
            prow, rhs = self.pivots[pv]
            acc = rhs
            for w, a in prow.items():
                x = value.get(w)
                if x:
                    acc -= a * x
            value[pv] = acc
        return {v: x for v, x in value.items() if x}

    def free_dimension(self, variables):
        return sum(1 for v in variables if v not in self.pivots)


def solve_dense(rows, rhs):
    """Solve a dense system given as lists; returns (solution, rank, consistent)."""
    system = SparseSystem(pivot_key=lambda v: -v)
    consistent = True
    for r, b in zip(rows, rhs):
        try:
            system.add({j: c for j, c in enumerate(r)}, b)
        except Inconsistent:
            consistent = False
    sol = system.solve()
    ncols = len(rows[0]) if rows else 0
    return [sol.get(j, 0) for j in range(ncols)], system.rank, consistent
