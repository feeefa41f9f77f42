import json

import numpy as np
import pytest

from orbitstar.errors import DomainError, ParseError, UsageError
from orbitstar.glue.checks import partition_change_difference, tangentiality_probe
from orbitstar.glue.cover import (Chart, ChartCover, glued_star, intersect_boxes,
                                  margin_weights)
from orbitstar.glue.diffop import DiffOp, LocalStar, apply_diffop, apply_star, hjet_of, hjet_values
from orbitstar.glue.fixtures import FIXTURES, cover_from_dict, load_fixture, load_fixture_doc
from orbitstar.glue.smooth import from_expr, mul

F = from_expr("exp(0.5*x1)*x2 + x1^2", 2)
G = from_expr("x2^2 - x1*x2 + exp(-x2)", 2)


def two_charts():
    return [Chart("U1", [(None, 1.0), (None, None)]), Chart("U2", [(-1.0, None), (None, None)])]


def moyal(H=2):
    return LocalStar.moyal(2, H, {(1, 2): 1.0})


def test_intersect_boxes():
    assert intersect_boxes([[(None, 1.0)], [(0.0, None)]]) == [(0.0, 1.0)]
    assert intersect_boxes([[(None, 0.0)], [(0.0, None)]]) is None


def test_empty_chart_side_rejected():
    with pytest.raises(UsageError):
        Chart("bad", [(1.0, 1.0)])


def test_single_chart_gives_identity():
    ch = Chart("U", [(None, None), (None, None)])
    cover = ChartCover([ch], moyal(), {}, margin_weights([ch], 0.5), 2, 4)
    A = cover.build_A(0)
    assert A.terms[1] == {} and A.terms[2] == {}
    x = (0.3, -0.2)
    ev = cover.evaluator(x)
    want = hjet_values(apply_star(moyal(), hjet_of(F, ev, 4, 2), hjet_of(G, ev, 4, 2), ev))
    assert glued_star(cover, F, G, x) == want


def test_identity_transition_gives_local_product():
    charts = two_charts()
    cover = ChartCover(charts, moyal(), {(1, 0): DiffOp.identity(2, 2)},
                       margin_weights(charts, 0.4), 2, 4)
    for r in (0, 1):
        A = cover.build_A(r)
        assert A.terms[1] == {} and A.terms[2] == {}
    for x in [(-0.5, 0.3), (0.0, 1.0), (0.9, -2.0), (-3.0, 0.0)]:
        ev = cover.evaluator(x)
        local = hjet_values(apply_star(moyal(), hjet_of(F, ev, 4, 2), hjet_of(G, ev, 4, 2), ev))
        got = glued_star(cover, F, G, x)
        assert max(abs(a - b) for a, b in zip(got, local)) < 1e-12
        assert got[0] == pytest.approx(F.at(x) * G.at(x), abs=1e-12)


def test_first_order_transition_expands():
    charts = two_charts()
    D = {(1, 0): 1.0, (0, 1): from_expr("x1", 2)}
    T = DiffOp(2, 2, {0: {(0, 0): 1.0}, 1: D})
    cover = ChartCover(charts, moyal(), {(1, 0): T}, margin_weights(charts, 0.4), 2, 4)
    A = cover.build_A(0)
    want = DiffOp(2, 2, {0: {(0, 0): 1.0}, 1: {a: mul(cover.partition[1], c) for a, c in D.items()}})
    for x in [(-0.5, 0.3), (0.2, 1.0), (0.7, -1.0)]:
        a = apply_diffop(A, F, x, 4)
        b = apply_diffop(want, F, x, 4)
        assert max(abs(p - q) for p, q in zip(a, b)) < 1e-13


def test_order_zero_slot_is_pointwise_product():
    cover = load_fixture("two-chart")
    rng = np.random.default_rng(1)
    for _ in range(10):
        x = (rng.uniform(-3, 3), rng.uniform(-3, 3))
        v = glued_star(cover, F, G, x)
        assert v[0] == pytest.approx(F.at(x) * G.at(x), rel=1e-13, abs=1e-13)


def test_outside_domain():
    charts = [Chart("U1", [(None, 0.0)]), Chart("U2", [(1.0, None)])]
    S = LocalStar.moyal(1, 1, {})
    cover = ChartCover(charts, S, {}, margin_weights(charts, 0.1), 1, 2)
    with pytest.raises(DomainError):
        glued_star(cover, from_expr("x1", 1), from_expr("x1", 1), (0.5,))
    with pytest.raises(DomainError):
        glued_star(cover, from_expr("x1", 1), from_expr("x1", 1), (-2.0,), chart=1)


def test_missing_transition_and_low_jet_order():
    charts = two_charts()
    with pytest.raises(UsageError, match="no transition"):
        ChartCover(charts, moyal(), {}, margin_weights(charts, 0.4), 2, 4)
    with pytest.raises(UsageError, match="jet order"):
        ChartCover(charts, moyal(), {(1, 0): DiffOp.identity(2, 2)}, margin_weights(charts, 0.4), 2, 1)
    with pytest.raises(UsageError, match="Id mod h"):
        ChartCover(charts, moyal(), {(1, 0): DiffOp(2, 2, {0: {(0, 0): 2.0}})},
                   margin_weights(charts, 0.4), 2, 4)


def test_trivial_plane_foliation():
    # zero bivector: every local product is the ordinary product, so any leaf x2 = c passes
    charts = two_charts()
    S = LocalStar.moyal(2, 2, {})
    T = DiffOp(2, 2, {0: {(0, 0): 1.0}})
    cover = ChartCover(charts, S, {(1, 0): T}, margin_weights(charts, 0.4), 2, 4)
    rep = tangentiality_probe(cover, {"coordinate": 2, "value": 0.5}, points=10)
    assert rep.passed and rep.max_defect == 0.0


def test_packaged_fixtures_load():
    for name in FIXTURES:
        cover = load_fixture(name)
        assert cover.name == name and cover.K >= cover.required_order()


def test_partition_change_records_only_higher_orders():
    doc = load_fixture_doc("two-chart")
    a = cover_from_dict(doc)
    b = cover_from_dict(doc, doc["partition_alt"])
    rep = partition_change_difference(a, b, points=10)
    assert rep.passed and rep.per_order[0] == 0.0
    # first-order terms of A cancel against a derivation; the partitions differ from h^2 on
    assert rep.per_order[2] > 1e-6
    assert "recorded only" in rep.table()


def test_fixture_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    with pytest.raises(ParseError):
        load_fixture_doc(str(bad))
    with pytest.raises(UsageError):
        load_fixture_doc("no-such-fixture")
    doc = load_fixture_doc("two-chart")
    doc["transitions"][0]["generator"][0]["d"] = [1, 0, 0]
    with pytest.raises(ParseError):
        cover_from_dict(doc)
    doc = json.loads(json.dumps(load_fixture_doc("two-chart")))
    del doc["n"]
    with pytest.raises(ParseError):
        cover_from_dict(doc)
