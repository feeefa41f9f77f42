from math import comb

import pytest

from orbitstar.coeff import Poly
from orbitstar.expr import parse_expr
from orbitstar.kontsevich import random_poly
from orbitstar.lie import catalog
from orbitstar.linalg import SparseSystem
from orbitstar.orbit import (_monomials_of_degree, buchberger, ideal_witness, is_normal_form,
                             kostant_decompose, monomial_basis, normal_form, orbit_ideal,
                             reconstruct, s_polynomials_reduce)


def P(s):
    return parse_expr(s, 3)


def test_buchberger_examples():
    p = P("x1^2 + x2^2 + x3^2 - 1")
    assert buchberger([p]) == [p]
    x1, x2 = P("x1"), P("x2")
    assert sorted(map(str, buchberger([x1, x2]))) == ["x1", "x2"]


def test_su3_groebner_basis(su3):
    I = orbit_ideal(su3, su3.regular_constants()[0])
    assert s_polynomials_reduce(I.groebner)
    assert s_polynomials_reduce(buchberger(I.generators))


def test_normal_form_examples(su2):
    I = orbit_ideal(su2, [1])
    assert normal_form(P("x3^2"), I) == P("1 - x1^2 - x2^2")
    assert normal_form(I.generators[0], I).is_zero()
    for e in monomial_basis(I, 3).all():
        b = Poly.monomial(e)
        assert normal_form(b, I) == b


def test_normal_form_properties(su2, rng):
    I = orbit_ideal(su2, [1])
    for _ in range(20):
        f = random_poly(rng, 3, max_deg=4)
        u = random_poly(rng, 3, max_deg=2)
        nf = normal_form(f, I)
        assert is_normal_form(nf, I)
        assert normal_form(nf, I) == nf
        assert normal_form(f + u * I.generators[0], I) == nf


def quotient_dimension(I, d):
    """dim of polynomials of degree <= d modulo the ideal, by a rank count
    on the products (p - c) * m, deg m <= d - 2 (reference)."""
    g = I.generators[0]
    s = SparseSystem()
    for k in range(d - 1):
        for e in _monomials_of_degree(3, k):
            prod = g * Poly.monomial(e)
            s.add({ee: c for (ee, _), c in prod.flat_items()}, 0)
    return comb(d + 3, 3) - s.rank


def test_su2_staircase_counts(su2):
    I = orbit_ideal(su2, [1])
    B = monomial_basis(I, 6)
    assert B.degree(0) == [(0, 0, 0)]
    assert sorted(B.degree(1)) == sorted([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    for d in range(7):
        assert len(B.degree(d)) == 2 * d + 1
        below = sum(len(B.degree(k)) for k in range(d + 1))
        assert below == quotient_dimension(I, d)


def test_decompose_examples(su2):
    I = orbit_ideal(su2, [1])
    assert kostant_decompose(P("x1^2 + x2^2 + x3^2"), I) == [((0,), (0, 0, 0), 1), ((1,), (0, 0, 0), 1)]
    assert kostant_decompose(P("x1*x2"), I) == [((0,), (1, 1, 0), 1)]
    terms = kostant_decompose(P("x3^2"), I)
    assert reconstruct(terms, I) == P("x3^2")


@pytest.mark.parametrize("name", ["su2", "su3", "heisenberg"])
def test_decompose_routes_agree(name, rng):
    A = catalog(name)
    I = orbit_ideal(A, A.regular_constants()[0] if A.regular_constants() else [1])
    for _ in range(15):
        f = random_poly(rng, A.n, max_deg=4)
        a = kostant_decompose(f, I, "solve")
        assert a == kostant_decompose(f, I, "division")
        assert reconstruct(a, I) == f
        assert all(I.in_staircase(b) for _, b, _ in a)


def test_ideal_witness_examples(su2):
    I = orbit_ideal(su2, [1])
    g = I.generators[0]
    x1 = P("x1")
    qs, r = ideal_witness(g * x1, I)
    assert qs == [x1] and r.is_zero()
    qs, r = ideal_witness(x1, I)
    assert qs[0].is_zero() and r == x1
    h2 = Poly.hvar(3) ** 2
    qs, r = ideal_witness(g * x1 + h2 * g, I)
    assert qs == [x1 + h2] and r.is_zero()


def test_ideal_witness_degree_bound(su3, rng):
    I = orbit_ideal(su3, su3.regular_constants()[0])
    for _ in range(10):
        f = random_poly(rng, 8, max_deg=4)
        qs, r = ideal_witness(f, I)
        total = r
        for q, g, w in zip(qs, I.generators, I.weights):
            total = total + q * g
            assert q.is_zero() or q.degree() <= f.degree() - w
        assert total == f
        assert r == normal_form(f, I)
