"""JSON fixture documents describing chart covers.

Layout::

    {
      "name": "...", "n": 2, "H": 2, "K": 6, "window": 3.0,
      "aliases": ["q", "p"],                       (optional)
      "charts": [{"name": "U1", "box": [[null, 2], [null, null]]}, ...],
      "star": {"type": "moyal", "bivector": [[1, 2, 1.0]]},
      "partition": {"margin": 1.0}  or  {"weights": ["flat(1 - x1)", ...]},
      "transitions": [
        {"from": 1, "to": 2,
         "generator": [{"h": 1, "coeff": "x2", "d": [1, 0]}],
         "extra": [{"h": 1, "coeff": "0.01", "d": [0, 1]}]}     (optional)
      ],
      "leaf": {"coordinate": 3, "value": 0.3}                  (optional)
    }

A transition "from r to s" is T_sr = exp(generator) + extra.  The reverse
direction is its operator inverse unless listed explicitly.  Partition
weights are normalized by their sum.  Chart indices are 1-based.
"""

import json
from importlib import resources
from pathlib import Path

from ..errors import ParseError, UsageError
from .cover import Chart, ChartCover, margin_weights, transition_from_generator
from .diffop import DiffOp, LocalStar
from .smooth import from_expr

FIXTURES = ("two-chart", "three-chart", "three-chart-perturbed", "foliated-r4", "leak-r4")


def _req(doc, key, where):
    if key not in doc:
        raise ParseError(f"missing key {key!r}", location=where)
    return doc[key]


def _op_terms(n, H, terms, aliases, where):
    out = {}
    for t in terms:
        k = int(_req(t, "h", where))
        d = tuple(int(v) for v in _req(t, "d", where))
        if len(d) != n:
            raise ParseError(f"derivative index {list(d)} does not have length {n}", location=where)
        c = from_expr(str(_req(t, "coeff", where)), n, aliases)
        row = out.setdefault(k, {})
        row[d] = c if d not in row else row[d] + c
    return DiffOp(n, H, out)


def _star(spec, n, H, where):
    kind = _req(spec, "type", where)
    if kind != "moyal":
        raise ParseError(f"unknown local product type {kind!r}", location=where)
    biv = {}
    for entry in spec.get("bivector", []):
        i, j, v = entry
        if not (1 <= i < j <= n):
            raise ParseError(f"bivector entry {entry} needs 1 <= i < j <= {n}", location=where)
        biv[(int(i), int(j))] = float(v)
    return LocalStar.moyal(n, H, biv)


def cover_from_dict(doc, partition=None):
    """Build a ChartCover; ``partition`` overrides the document's partition."""
    n = int(_req(doc, "n", "fixture"))
    H = int(_req(doc, "H", "fixture"))
    K = int(_req(doc, "K", "fixture"))
    aliases = doc.get("aliases")
    charts = []
    for k, c in enumerate(_req(doc, "charts", "fixture")):
        box = _req(c, "box", f"charts[{k}]")
        if len(box) != n:
            raise ParseError(f"box has {len(box)} sides, expected {n}", location=f"charts[{k}]")
        charts.append(Chart(c.get("name", f"U{k + 1}"), box))
    default_star = doc.get("star")
    stars = []
    for k, c in enumerate(doc["charts"]):
        spec = c.get("star", default_star)
        if spec is None:
            raise ParseError("no local product given", location=f"charts[{k}]")
        stars.append(_star(spec, n, H, f"charts[{k}].star"))
    part = partition if partition is not None else _req(doc, "partition", "fixture")
    if "weights" in part:
        weights = [from_expr(w, n, aliases) for w in part["weights"]]
        if len(weights) != len(charts):
            raise ParseError("need one partition weight per chart", location="partition")
    else:
        weights = margin_weights(charts, float(_req(part, "margin", "partition")))
    transitions = {}
    for k, t in enumerate(doc.get("transitions", [])):
        where = f"transitions[{k}]"
        r = int(_req(t, "from", where)) - 1
        s = int(_req(t, "to", where)) - 1
        if not (0 <= r < len(charts) and 0 <= s < len(charts)) or r == s:
            raise ParseError("bad chart indices", location=where)
        gen = _op_terms(n, H, t.get("generator", []), aliases, where)
        extra = _op_terms(n, H, t["extra"], aliases, where) if "extra" in t else None
        transitions[(s, r)] = transition_from_generator(n, H, gen, extra)
    return ChartCover(charts, stars, transitions, weights, H, K,
                      name=doc.get("name", "cover"), window=doc.get("window", 3.0))


def load_fixture_doc(ref):
    """Parse a fixture document from a path or a packaged fixture name."""
    p = Path(ref)
    if p.suffix == ".json" or p.exists():
        try:
            text = p.read_text()
        except OSError as exc:
            raise UsageError(f"cannot read fixture {ref}: {exc}")
    elif ref in FIXTURES:
        text = resources.files("orbitstar.data").joinpath("fixtures", f"{ref}.json").read_text()
    else:
        raise UsageError(f"unknown fixture {ref!r}; known: {', '.join(FIXTURES)}")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, location=f"line {exc.lineno}, column {exc.colno}")


def load_fixture(ref, partition=None):
    return cover_from_dict(load_fixture_doc(ref), partition)
