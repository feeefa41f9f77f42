"""hypothesis strategies shared by the test modules."""

from fractions import Fraction

from hypothesis import strategies as st

from orbitstar.coeff import Poly

small_rationals = st.builds(Fraction, st.integers(-3, 3), st.integers(1, 3))


@st.composite
def polys(draw, n, max_deg=3, max_terms=4, with_h=False):
    out = Poly.zero(n)
    for _ in range(draw(st.integers(0, max_terms))):
        e = [0] * n
        for _ in range(draw(st.integers(0, max_deg))):
            e[draw(st.integers(0, n - 1))] += 1
        k = draw(st.integers(0, 2)) if with_h else 0
        out = out + Poly.monomial(e, draw(small_rationals), k)
    return out
