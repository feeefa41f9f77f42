import random

import pytest

from orbitstar.errors import UsageError
from orbitstar.lie import catalog
from orbitstar.pbw import (PBWElement, center_check, commutator, normal_order,
                           normal_order_rewrite, pbw_mul, symbol)
from orbitstar.weyl import sym

from oracles import random_element

W = PBWElement.word




def hscale(k):
    from orbitstar.coeff import HPoly
    return HPoly((0,) * k + (1,))


def test_normal_order_examples(su2, heis):
    expected = W((1, 2)) - W((3,)).scale(hscale(1))
    assert normal_order((2, 1), su2) == expected
    assert normal_order((2, 1), heis) == expected
    assert normal_order((1, 1, 2, 3), su2) == W((1, 1, 2, 3))


def test_out_of_range_word(su2):
    with pytest.raises(UsageError):
        normal_order((1, 4), su2)


@pytest.mark.parametrize("name", ["heisenberg", "su2", "su3"])
def test_memoized_matches_rewriting(name):
    A = catalog(name)
    rng = random.Random(5)
    for _ in range(40):
        w = [rng.randint(1, A.n) for _ in range(rng.randint(0, 4))]
        ref, _ = normal_order_rewrite(w, A)
        assert normal_order(w, A) == ref


def test_products(su2):
    X1, X2 = PBWElement.generator(1), PBWElement.generator(2)
    u = normal_order((3, 1, 2), su2)
    assert pbw_mul(PBWElement.unit(), u, su2) == u
    assert pbw_mul(X1, X2, su2) == W((1, 2))
    assert commutator(X1, X2, su2) == W((3,)).scale(hscale(1))


def test_casimir_central(su2):
    P = W((1, 1)) + W((2, 2)) + W((3, 3))
    assert pbw_mul(P, PBWElement.generator(1), su2) == pbw_mul(PBWElement.generator(1), P, su2)
    assert center_check(P, su2)
    assert center_check(PBWElement.unit(), su2)
    assert not center_check(PBWElement.generator(1), su2)
    rng = random.Random(11)
    for _ in range(20):
        assert commutator(P, random_element(rng, su2), su2).is_zero()


def test_su3_generator_commutators(su3):
    for i in range(1, 9):
        for j in range(1, 9):
            want = PBWElement.zero()
            for k, c in su3.brackets.get((i, j), {}).items():
                want = want + W((k,)).scale(hscale(1)).scale(c)
            got = commutator(PBWElement.generator(i), PBWElement.generator(j), su3)
            assert got == want


@pytest.mark.parametrize("name", ["heisenberg", "su2"])
def test_associativity(name):
    A = catalog(name)
    rng = random.Random(3)
    for _ in range(25):
        a, b, c = (random_element(rng, A) for _ in range(3))
        assert pbw_mul(pbw_mul(a, b, A), c, A) == pbw_mul(a, pbw_mul(b, c, A), A)


def test_symbol_of_sym(su2):
    from orbitstar.expr import parse_expr
    f = parse_expr("x1^2*x3 - x2", 3)
    assert symbol(sym(f, su2), 3) == parse_expr("x1^2*x3", 3)
