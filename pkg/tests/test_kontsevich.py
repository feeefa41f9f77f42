import random
from fractions import Fraction

import pytest

from orbitstar.coeff import Poly
from orbitstar.errors import InternalError
from orbitstar.expr import parse_expr
from orbitstar.kontsevich import (Order2Weights, PoissonStructure, _h2_constraints,
                                  associativity_defect, b1, default_weights, from_lie,
                                  quadratic_plane, random_poly, solve_order2_weights, star_k2)
from orbitstar.lie import poisson_bracket

# solved once, then frozen; literature value for the order-2 universal formula
FROZEN = Order2Weights(Fraction(1, 8), Fraction(1, 12))


def test_from_lie_su2(su2):
    P = from_lie(su2)
    x1, x2, x3 = (Poly.var(3, i) for i in (1, 2, 3))
    assert P.entry(1, 2) == x3 and P.entry(1, 3) == -x2 and P.entry(2, 3) == x1
    assert P.entry(2, 1) == -x3
    assert all(not d for d in P.jacobi_defects())


def test_from_lie_heisenberg(heis):
    P = from_lie(heis)
    assert P.entry(1, 2) == Poly.var(3, 3)
    assert sorted((i, j) for i, j, _ in P.nonzero()) == [(1, 2), (2, 1)]


def test_abelian_structure_is_zero():
    P = PoissonStructure(2, {})
    assert list(P.nonzero()) == []
    with pytest.raises(InternalError, match="underdetermined"):
        solve_order2_weights([P], triples=5)


def test_weights_from_su2_alone(su2):
    assert solve_order2_weights([from_lie(su2)], triples=30, seed=3) == FROZEN


def test_weights_stable_across_seeds_and_structures(su2, heis):
    assert default_weights() == FROZEN
    assert solve_order2_weights([from_lie(su2), from_lie(heis)], seed=11) == FROZEN
    assert solve_order2_weights([from_lie(heis), quadratic_plane()], triples=30) == FROZEN


def test_heisenberg_constraints_consistent_with_su2_weights(heis):
    # Heisenberg alone pins only one combination; the su2 solution must satisfy it
    P = from_lie(heis)
    rng = random.Random(5)
    for _ in range(20):
        f, g, k = (random_poly(rng, 3) for _ in range(3))
        for a, b, c in _h2_constraints(f, g, k, P).values():
            assert a * FROZEN.w_sym2 + b * FROZEN.w_loop + c == 0


def test_other_weights_break_associativity(su2):
    P = from_lie(su2)
    bad = Order2Weights(Fraction(1, 8), Fraction(1, 6))
    rng = random.Random(0)
    broken = any(associativity_defect(*(random_poly(rng, 3) for _ in range(3)), P, bad)
                 for _ in range(20))
    assert broken


@pytest.mark.parametrize("name", ["su2", "heisenberg", "su3", "plane"])
def test_associativity(name):
    from orbitstar.lie import catalog
    P = quadratic_plane() if name == "plane" else from_lie(catalog(name))
    rng = random.Random(7)
    count = 10 if name == "su3" else 30
    for _ in range(count):
        f, g, k = (random_poly(rng, P.n) for _ in range(3))
        assert not associativity_defect(f, g, k, P, FROZEN)


def test_unit_and_first_order(su2, rng):
    P = from_lie(su2)
    one = Poly.one(3)
    for _ in range(20):
        f, g = random_poly(rng, 3), random_poly(rng, 3)
        assert star_k2(f, one, P) == f and star_k2(one, f, P) == f
        fg = star_k2(f, g, P)
        assert fg.h_part(0) == f * g
        comm = (fg - star_k2(g, f, P)).truncate_h(1)
        assert comm == poisson_bracket(f, g, su2).shift_h(1)


def test_commutator_of_coordinates(su2):
    P = from_lie(su2)
    x, y = Poly.var(3, 1), Poly.var(3, 2)
    assert star_k2(x, y, P) - star_k2(y, x, P) == parse_expr("h*x3", 3)


def test_b1_on_plane():
    P = quadratic_plane()
    x, y = Poly.var(2, 1), Poly.var(2, 2)
    assert b1(x, y, P) == (x * x).scale(Fraction(1, 2))


def test_h_dependent_inputs_are_bilinear(su2):
    P = from_lie(su2)
    h = Poly.hvar(3)
    x, y = Poly.var(3, 1), Poly.var(3, 2)
    assert star_k2(h * x, y, P) == (h * star_k2(x, y, P)).truncate_h(2)
