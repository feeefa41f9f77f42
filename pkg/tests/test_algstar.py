from fractions import Fraction

import pytest

from orbitstar.algstar import (GeneratorShift, QuantizationData, StarProduct, compute_delta,
                               default_sample, equivalence_residual, equivalence_solver, eta,
                               eta_operators, gq_mismatch, psi, psi_inv, star_p, star_p_handle,
                               star_p_orbit, star_s_handle, tangentiality_check)
from orbitstar.coeff import HPoly, Poly
from orbitstar.errors import UsageError
from orbitstar.expr import parse_expr
from orbitstar.kontsevich import random_poly
from orbitstar.lie import poisson_bracket
from orbitstar.orbit import monomial_basis, normal_form, orbit_ideal
from orbitstar.pbw import PBWElement, normal_order
from orbitstar.weyl import star_s, sym


def P(s, n=3):
    return parse_expr(s, n)


@pytest.fixture(scope="module")
def Q(su2):
    return QuantizationData.build(su2, [1])


@pytest.fixture(scope="module")
def Qh(su2):
    return QuantizationData.build(su2, [1], [P("1 + h")])


def test_psi_examples(su2, Qh):
    assert psi(Poly.one(3), Qh) == PBWElement.unit()
    p = su2.invariants[0]
    assert psi(p - Poly.one(3), Qh) == sym(p, su2) - PBWElement.scalar(HPoly((1, 1)))
    I = Qh.ideal
    for e in monomial_basis(I, 3).all():
        word = tuple(i + 1 for i, k in enumerate(e) for _ in range(k))
        assert psi(Poly.monomial(e), Qh) == normal_order(word, su2)


def test_psi_inverse(su2, Qh, rng):
    assert psi_inv(PBWElement.unit(), Qh) == Poly.one(3)
    p = su2.invariants[0]
    assert psi_inv(sym(p, su2), Qh) == p + Poly.hvar(3)
    for _ in range(50):
        f = random_poly(rng, 3, max_deg=5)
        assert psi_inv(psi(f, Qh), Qh) == f


def test_c_h_must_reduce_to_c0(su2):
    with pytest.raises(UsageError):
        QuantizationData.build(su2, [1], [P("2 + h")])


def test_star_p_properties(su2, su3, Q, rng):
    one = Poly.one(3)
    x, y, z = (su2.var(i) for i in (1, 2, 3))
    assert star_p(x, y, Q) - star_p(y, x, Q) == Poly.hvar(3) * z
    p = su2.invariants[0]
    for _ in range(10):
        f = random_poly(rng, 3, max_deg=3)
        assert star_p(f, one, Q) == f
        assert star_p(f, p, Q) == f * p
        g = random_poly(rng, 3, max_deg=3)
        fg = star_p(f, g, Q)
        assert fg.h_part(0) == f * g
        assert (fg - star_p(g, f, Q)).truncate_h(1) == poisson_bracket(f, g, su2).shift_h(1)


def test_star_p_orbit(su2, Q, rng):
    I = Q.ideal
    x = su2.var(1)
    nf_p = normal_form(su2.invariants[0], I)
    assert star_p_orbit(nf_p, x, Q) == x
    assert star_p_orbit(Poly.one(3), x, Q) == x
    with pytest.raises(UsageError):
        star_p_orbit(P("x3^2"), x, Q)
    for _ in range(10):
        f, g, u = (random_poly(rng, 3, max_deg=3) for _ in range(3))
        a = normal_form(star_p(f + u * I.generators[0], g, Q), I)
        assert a == normal_form(star_p(f, g, Q), I)


@pytest.mark.parametrize("ch", ["1", "1 + h", "1 + h^2/3"])
def test_eta_on_generator(su2, ch):
    Q = QuantizationData.build(su2, [1], [P(ch)])
    p = su2.invariants[0]
    assert eta(p - Poly.one(3), Q) == p - P(ch)
    assert eta(Poly.one(3), Q) == Poly.one(3)


def test_eta_homomorphism(su2, Qh, rng):
    for _ in range(10):
        f, g = random_poly(rng, 3, max_deg=3), random_poly(rng, 3, max_deg=3)
        assert eta(star_p(f, g, Qh), Qh) == star_s(eta(f, Qh), eta(g, Qh), su2)


def test_tangentiality(su2, heis, Q):
    I = Q.ideal
    assert tangentiality_check(star_p_handle(Q), I).passed
    rep = tangentiality_check(star_s_handle(su2), I)
    assert not rep.passed
    g, f, side, nf = rep.witness
    assert f == su2.var(1) and nf == P("-1/3*h^2*x1")
    assert "-1/3*h^2*x" in rep.describe(su2.format)
    J = orbit_ideal(heis, [2])
    assert tangentiality_check(star_s_handle(heis), J).passed


def test_default_sample_starts_with_coordinates():
    s = default_sample(3)
    assert s[:3] == [Poly.var(3, i) for i in (1, 2, 3)]
    assert s[3] == Poly.one(3)


def test_compute_delta_examples(su2, Q):
    h = Poly.hvar(1)
    p = Poly.var(1, 1)
    r = compute_delta(Q, GeneratorShift([Poly.const(1, 2) + h]))
    assert r.delta == [HPoly((2, 1))] and r.b == [[Poly.zero(1)]]
    r = compute_delta(Q, GeneratorShift([p]))
    assert r.delta == [HPoly((1,))] and r.b == [[Poly.one(1)]]
    assert r.invertible and r.identity_holds and r.orbit_membership
    r = compute_delta(Q, GeneratorShift([p ** 2 + h * p]))
    assert r.delta == [HPoly((1, 1))]
    assert r.b == [[p + Poly.one(1) + h]]
    assert r.identity_holds and r.invertible


def test_compute_delta_two_invariants(su3):
    Q = QuantizationData.build(su3, su3.regular_constants()[0])
    c1, c2 = Q.ideal.c0
    p1, p2 = Poly.var(2, 1), Poly.var(2, 2)
    h = Poly.hvar(2)
    r = compute_delta(Q, GeneratorShift([p1 * p2, p2 + h * p1 ** 2]))
    assert r.delta == [HPoly((c1 * c2,)), HPoly((c2, c1 * c1))]
    assert r.identity_holds and r.invertible and r.orbit_membership


def test_gq_mismatch():
    p = Poly.var(1, 1)
    h = Poly.hvar(1)
    assert gq_mismatch(2, GeneratorShift([Poly.const(1, 2)]), 3) is None
    # a shift whose Delta grows an h-correction is detected at that order
    assert gq_mismatch(2, GeneratorShift([Poly.const(1, 2) + h * p.scale(Fraction(1, 2))]), 3) == 2


def test_equivalence_solver(su2, heis, Q):
    S = star_s_handle(su2)
    res = equivalence_solver(S, S, 3, 2, 2)
    assert res.success and all(not T for T in res.operators.values())
    res = equivalence_solver(star_p_handle(Q), S, 3, 3, 2)
    assert res.success and res.residual == 0
    assert equivalence_residual(star_p_handle(Q), S, res.operators, 3, 3, 2) == 0


def test_equivalence_failure_reported(su2):
    S = star_s_handle(su2)
    # a commutative deformation cannot be equivalent to a noncommutative one
    plain = StarProduct("plain", 3, lambda f, g: f * g)
    res = equivalence_solver(plain, S, 3, 2, 1)
    assert not res.success and res.failed_order == 1
    assert "not equivalent at order 1" in res.message


def test_eta_operators_certify(su2, Qh):
    Ts = eta_operators(Qh, 6, 2)
    assert equivalence_residual(star_p_handle(Qh), star_s_handle(su2), Ts, 3, 3, 2) == 0
