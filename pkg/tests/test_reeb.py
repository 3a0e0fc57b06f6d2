from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reeb_sandwich.config import AnalysisConfig
from reeb_sandwich.funcspec import FunctionSpec
from reeb_sandwich.reeb import (
    Carrier,
    EndKind,
    VertexType,
    build_reeb_graph,
    event_levels,
    graph_invariants,
    level_components,
    merge_levels,
    vertex_type,
)

from family import safe_config
from helpers import FIXTURES, specs, sweep


def _ends(comps):
    return [(c.lo, c.hi) for c in comps.components]


# -- level components ---------------------------------------------------------------

def test_example_two_below_the_merge():
    cfg, c1, c2 = specs("example2_t0_0.5")
    got = _ends(level_components(c1, c2, 0.25, cfg.interval))
    r3 = math.sqrt(3)
    assert np.allclose(got, [(-r3, -1), (1, r3)], atol=1e-8)


def test_example_two_above_the_merge():
    cfg, c1, c2 = specs("example2_t0_0.5")
    (got,) = _ends(level_components(c1, c2, 0.75, cfg.interval))
    assert np.allclose(got, (-1 / math.sqrt(3), 1 / math.sqrt(3)), atol=1e-8)


def test_example_two_above_everything():
    cfg, c1, c2 = specs("example2_t0_0.5")
    assert len(level_components(c1, c2, 1.5, cfg.interval)) == 0


def test_example_one_zero_level_is_seven_points():
    cfg, c1, c2 = specs("example1_1")
    comps = level_components(c1, c2, 0.0, cfg.interval)
    assert all(c.is_point or c.hi - c.lo < 1e-6 for c in comps.components)
    mids = [0.5 * (c.lo + c.hi) for c in comps.components]
    assert np.allclose(mids, [k * math.pi for k in range(-3, 4)], atol=1e-6)


@pytest.mark.parametrize("name", FIXTURES)
def test_components_sorted_disjoint_and_on_the_curves(name):
    cfg, c1, c2 = specs(name)
    levels, t_range = event_levels(c1, c2, cfg.interval)
    rng = np.random.default_rng(5)
    for t in rng.uniform(t_range.lo, t_range.hi, 40):
        comps = level_components(c1, c2, t, cfg.interval).components
        assert all(a.hi < b.lo for a, b in zip(comps, comps[1:]))
        for c in comps:
            for x, carrier in ((c.lo, c.lo_carrier), (c.hi, c.hi_carrier)):
                if carrier is Carrier.CURVE1:
                    assert abs(c1(x) - t) <= 1e-7 * (1 + abs(t))
                elif carrier is Carrier.CURVE2:
                    assert abs(c2(x) - t) <= 1e-7 * (1 + abs(t))
                else:
                    assert x in (cfg.window[0], cfg.window[1])


@pytest.mark.parametrize("name", FIXTURES)
def test_slab_constancy(name):
    cfg, c1, c2 = specs(name)
    levels, _ = event_levels(c1, c2, cfg.interval)
    rng = np.random.default_rng(2)
    for a, b in zip(levels, levels[1:]):
        if b - a < 1e-6:
            continue
        t, u = a + (b - a) * rng.uniform(0.05, 0.95, 2)
        assert level_components(c1, c2, t, cfg.interval).signature() == level_components(c1, c2, u, cfg.interval).signature()


# -- graphs ---------------------------------------------------------------------------

def test_example_two_graph():
    g = sweep("example2_t0_0.5")
    by_type = {v.type: v for v in g.vertices}
    assert set(by_type) == {VertexType.MERGE, VertexType.MAX}
    merge, top = by_type[VertexType.MERGE], by_type[VertexType.MAX]
    assert merge.level == pytest.approx(0.5) and top.level == pytest.approx(1.0)
    assert [(w.curve, round(w.s, 9)) for w in merge.witnesses] == [(1, 0.0)]
    assert [(w.curve, round(w.s, 9)) for w in top.witnesses] == [(2, 0.0)]
    compact = [e for e in g.edges if e.compact]
    assert len(compact) == 1 and (compact[0].lower.vertex, compact[0].upper.vertex) == (merge.id, top.id)
    lower = [e for e in g.edges if e.lower.kind is EndKind.TRUNCATION]
    assert len(lower) == 2 and all(e.upper.vertex == merge.id for e in lower)


def test_example_two_invariants():
    inv = graph_invariants(sweep("example2_t0_0.5"))
    assert dict(inv.vertices_by_type) == {"Merge": 1, "Max": 1}
    assert inv.e_compact == 1 and dict(inv.terminations) == {"WindowTruncation": 2} and inv.b1 == 0


def test_example_one_graph():
    g = sweep("example1_1")
    mins = sorted((v for v in g.vertices if v.type is VertexType.MIN), key=lambda v: v.x)
    assert len(mins) == 7
    assert all(abs(v.level) <= 1e-6 for v in mins)
    assert np.allclose([v.x for v in mins], [k * math.pi for k in range(-3, 4)], atol=1e-8)
    (top,) = [v for v in g.vertices if v.type is VertexType.MAX]
    assert top.level == pytest.approx(1.0, abs=1e-6) and top.witnesses[0].curve == 2
    inv = graph_invariants(g)
    # six merges would be needed for a binary tree; the two central maxima of
    # c1 share a level and join three strands at once
    assert dict(inv.vertices_by_type) == {"Min": 7, "Merge": 5, "Max": 1}
    assert inv.e_compact == 12 and inv.terminations == () and inv.b1 == 0


def test_affine_pair_is_one_truncated_edge():
    c1 = FunctionSpec.build("c1", "x", window=(1, 2))
    c2 = FunctionSpec.build("c2", "x + 1", window=(1, 2))
    g = build_reeb_graph(c1, c2)
    assert g.vertices == ()
    (e,) = g.edges
    assert e.lower.kind is EndKind.TRUNCATION and e.upper.kind is EndKind.TRUNCATION
    inv = graph_invariants(g)
    assert inv.vertex_count == 0 and inv.e_total == 1 and inv.b1 == 0 and inv.components == 1


def _band(m: int) -> AnalysisConfig:
    """c1 and c2 squeeze a horizontal band that is a whole line for |t| < 1/2."""

    def tails(limit, sign, left, right):
        return {
            "-inf": {"limit": limit, "sign_vs_limit": sign, "monotone_beyond": {"threshold": 0, "direction": left}},
            "+inf": {"limit": limit, "sign_vs_limit": sign, "monotone_beyond": {"threshold": 0, "direction": right}},
        }

    return AnalysisConfig.from_dict({
        "c1": {"expr": "-1 + 0.5*exp(-x^2)", "tails": tails(-1, "strictly_above", "increasing", "decreasing")},
        "c2": {"expr": "1 - 0.5*exp(-x^2)", "tails": tails(1, "strictly_below", "decreasing", "increasing")},
        "m": m,
    })


def test_whole_line_component_doubles_only_for_m_two():
    for m, tracks, b1 in ((2, 2, 1), (3, 1, 0)):
        cfg = _band(m)
        c1, c2 = cfg.build_specs()
        assert level_components(c1, c2, 0.0, cfg.interval, m=m).contour_count == tracks
        inv = graph_invariants(build_reeb_graph(c1, c2, cfg.interval, m))
        assert inv.b1 == b1


def test_double_incidence_vertices_are_typed():
    cfg = _band(2)
    c1, c2 = cfg.build_specs()
    g = build_reeb_graph(c1, c2, cfg.interval, 2)
    assert sorted(g.degree(v.id) for v in g.vertices) == [(2, 2), (2, 2)]


@pytest.mark.parametrize(
    "lower, upper, vtype",
    [(0, 1, VertexType.MIN), (0, 3, VertexType.MIN), (1, 0, VertexType.MAX), (2, 1, VertexType.MERGE),
     (1, 2, VertexType.SPLIT), (1, 1, VertexType.DEGREE2), (3, 2, VertexType.MERGE), (2, 2, VertexType.SPLIT)],
)
def test_vertex_typing(lower, upper, vtype):
    assert vertex_type(lower, upper) is vtype


def test_merge_levels_clusters():
    assert merge_levels([0.0, 5e-9, 1.0, 1.0 + 2e-8]) == pytest.approx([2.5e-9, 1.0, 1.0 + 2e-8])


def _all_graphs():
    for name in FIXTURES:
        yield name, sweep(name)


@pytest.mark.parametrize("name", FIXTURES)
def test_graph_structure_invariants(name):
    g = sweep(name)
    cfg, c1, c2 = specs(name)
    tol = cfg.level_merge_tol
    for e in g.edges:
        assert e.lower.level < e.upper.level
    for v in g.vertices:
        lower, upper = g.degree(v.id)
        assert v.witnesses
        if v.type is VertexType.MIN:
            assert lower == 0 and upper >= 1
        elif v.type is VertexType.MAX:
            assert upper == 0 and lower >= 1
        elif v.type is VertexType.MERGE:
            assert lower >= 2
        elif v.type is VertexType.SPLIT:
            assert upper >= 2
        else:
            assert (lower, upper) == (1, 1)
        for w in v.witnesses:
            f = c1 if w.curve == 1 else c2
            assert abs(f(w.s) - v.level) <= 2 * tol
    # every critical point inside the t-range witnesses exactly one vertex
    witnesses = [(w.curve, w.s) for v in g.vertices for w in v.witnesses]
    for curve, f in ((1, c1), (2, c2)):
        for p in f.critical_points:
            if g.t_range.lo - tol <= p.value <= g.t_range.hi + tol:
                hits = [s for c, s in witnesses if c == curve and abs(s - p.x) <= 1e-9 * (1 + abs(p.x))]
                assert len(hits) == 1


@pytest.mark.parametrize("name", FIXTURES)
def test_edges_carry_every_contour(name):
    """Edges spanning a slab are exactly the contours at its midpoint."""
    g = sweep(name)
    cfg, c1, c2 = specs(name)
    for a, b in zip(g.events, g.events[1:]):
        t = 0.5 * (a + b)
        spanning = [e for e in g.edges if e.lower.level <= a + 1e-12 and e.upper.level >= b - 1e-12]
        assert len(spanning) == level_components(c1, c2, t, cfg.interval, m=cfg.m).contour_count


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=15, deadline=None)
def test_random_pairs_have_consistent_graphs(seed):
    cfg = safe_config(seed)
    c1, c2 = cfg.build_specs()
    g = build_reeb_graph(c1, c2, cfg.interval)
    inv = graph_invariants(g)
    assert inv.b1 >= 0 and inv.components >= 1
    assert all(e.lower.level < e.upper.level for e in g.edges)
    # handshake: every compact edge contributes one upper and one lower incidence
    lower = sum(g.degree(v.id)[0] for v in g.vertices)
    upper = sum(g.degree(v.id)[1] for v in g.vertices)
    assert lower == sum(1 for e in g.edges if e.upper.kind is EndKind.VERTEX)
    assert upper == sum(1 for e in g.edges if e.lower.kind is EndKind.VERTEX)
