import random

import pytest

from orbitstar.errors import UsageError
from orbitstar.glue.diffop import (DiffOp, LocalStar, apply_diffop, apply_inverse,
                                   apply_to_hjet, compose_diffops, exp_diffop, hjet_of,
                                   hjet_values, invert_diffop)
from orbitstar.glue.jets import jet_space
from orbitstar.glue.smooth import Evaluator, coord, from_expr


def close_ops(D1, D2, points, K=6, tol=1e-12):
    """Compare two operators by applying them to test functions at points."""
    n = D1.n
    fs = [from_expr(s, n) for s in (["exp(x1)*x1^2 + x1", "exp(0.3*x1 - x1^2)"] if n == 1 else
                                    ["exp(x1 - x2)*x1^2 + x2^3", "x1*x2^2 + exp(0.5*x2)"])]
    for x in points:
        for f in fs:
            a = apply_diffop(D1, f, x, K)
            b = apply_diffop(D2, f, x, K)
            assert max(abs(u - v) for u, v in zip(a, b)) < tol


def test_apply_examples():
    one = DiffOp.identity(1, 2)
    f = from_expr("x1^2", 1)
    assert apply_diffop(one, f, (3.0,)) == [9.0, 0.0, 0.0]
    D = DiffOp(1, 2, {1: {(1,): 1.0}})
    assert apply_diffop(D, f, (3.0,))[1] == 6.0
    DD = compose_diffops(D, D)
    assert apply_diffop(DD, from_expr("x1^3", 1), (1.0,))[2] == 6.0


def test_compose_examples():
    D = DiffOp(2, 2, {1: {(1, 0): 1.0}, 2: {(0, 1): coord(2)}})
    close_ops(compose_diffops(DiffOp.identity(2, 2), D), D, [(0.4, 0.7)])
    d1 = DiffOp(1, 0, {0: {(1,): 1.0}})
    x1 = DiffOp(1, 0, {0: {(0,): coord(1)}})
    got = compose_diffops(d1, x1)
    want = DiffOp(1, 0, {0: {(1,): coord(1), (0,): 1.0}})
    close_ops(got, want, [(0.3,), (-1.2,)], K=2)
    phi = from_expr("exp(x1)*x2", 2)
    A = DiffOp(2, 2, {1: {(1, 0): 1.0}})
    B = DiffOp(2, 2, {1: {(0, 1): phi}})
    want = DiffOp(2, 2, {2: {(0, 1): from_expr("exp(x1)*x2", 2), (1, 1): phi}})
    close_ops(compose_diffops(A, B), want, [(0.1, 0.2), (1.0, -0.5)])


def test_compose_matches_sequential_application():
    rng = random.Random(0)
    A = DiffOp(2, 2, {1: {(1, 0): from_expr("x2^2", 2), (0, 1): 0.5}, 2: {(1, 1): from_expr("exp(x1)", 2)}})
    B = DiffOp(2, 2, {0: {(0, 0): 1.0}, 1: {(0, 1): from_expr("x1*x2", 2)}, 2: {(2, 0): 1.0}})
    C = compose_diffops(A, B)
    f = from_expr("exp(x1 + 0.2*x2^2) + x1^3*x2", 2)
    for _ in range(5):
        x = (rng.uniform(-1, 1), rng.uniform(-1, 1))
        ev = Evaluator(jet_space(2, 8), x)
        u = hjet_of(f, ev, 6, 2)
        seq = hjet_values(apply_to_hjet(A, apply_to_hjet(B, u, ev), ev))
        direct = hjet_values(apply_to_hjet(C, u, ev))
        assert max(abs(a - b) for a, b in zip(seq, direct)) < 1e-12


def test_invert_examples():
    one = DiffOp.identity(1, 2)
    close_ops(invert_diffop(one), one, [(0.5,)])
    D = DiffOp(1, 2, {0: {(0,): 1.0}, 1: {(1,): 1.0}})
    want = DiffOp(1, 2, {0: {(0,): 1.0}, 1: {(1,): -1.0}, 2: {(2,): 1.0}})
    close_ops(invert_diffop(D), want, [(0.5,), (-2.0,)])


def test_invert_round_trip_random():
    rng = random.Random(4)
    for _ in range(3):
        X = DiffOp(2, 2, {1: {(1, 0): from_expr(f"{rng.uniform(-1, 1)}*x2 + 0.1", 2),
                              (0, 1): from_expr(f"exp({rng.uniform(-1, 1)}*x1)", 2)},
                          2: {(1, 1): rng.uniform(-1, 1)}})
        T = exp_diffop(X)
        round_trip = compose_diffops(invert_diffop(T), T)
        close_ops(round_trip, DiffOp.identity(2, 2),
                  [(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(3)], K=8, tol=1e-10)
        f = from_expr("exp(x1)*x2^2", 2)
        x = (0.2, -0.4)
        ev = Evaluator(jet_space(2, 10), x)
        u = hjet_of(f, ev, 8, 2)
        back = apply_inverse(T, apply_to_hjet(T, u, ev), ev)
        assert max(abs(a - b) for a, b in zip(hjet_values(back), hjet_values(u))) < 1e-10


def test_invert_requires_identity_mod_h():
    with pytest.raises(UsageError):
        invert_diffop(DiffOp(1, 2, {0: {(0,): 2.0}}))
    with pytest.raises(UsageError):
        exp_diffop(DiffOp(1, 2, {0: {(1,): 1.0}}))


def test_jet_order_too_small():
    D = DiffOp(1, 1, {1: {(3,): 1.0}})
    with pytest.raises(UsageError):
        apply_diffop(D, coord(1), (0.0,), K=2)


def test_moyal_product_homomorphism():
    # exp of a Hamiltonian-type constant-coefficient derivation preserves Moyal
    S = LocalStar.moyal(2, 2, {(1, 2): 1.0})
    T = exp_diffop(DiffOp(2, 2, {1: {(1, 0): 0.7, (0, 1): -0.2}}))
    f, g = from_expr("exp(x1)*x2", 2), from_expr("x1^2 + x2^3", 2)
    x = (0.3, -0.6)
    ev = Evaluator(jet_space(2, 8), x)
    u, v = hjet_of(f, ev, 8, 2), hjet_of(g, ev, 8, 2)
    from orbitstar.glue.diffop import apply_star
    lhs = apply_to_hjet(T, apply_star(S, u, v, ev), ev)
    rhs = apply_star(S, apply_to_hjet(T, u, ev), apply_to_hjet(T, v, ev), ev)
    assert max(abs(a - b) for a, b in zip(hjet_values(lhs), hjet_values(rhs))) < 1e-12


def test_moyal_first_order_is_half_bracket():
    S = LocalStar.moyal(2, 1, {(1, 2): 1.0})
    x = (1.0, 2.0)
    ev = Evaluator(jet_space(2, 3), x)
    u = hjet_of(coord(1), ev, 3, 1)
    v = hjet_of(coord(2), ev, 3, 1)
    from orbitstar.glue.diffop import apply_star
    assert hjet_values(apply_star(S, u, v, ev)) == [2.0, 0.5]
