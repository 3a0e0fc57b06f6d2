from __future__ import annotations

import warnings
from dataclasses import replace

import numpy as np
import pytest

from reeb_sandwich.errors import ResolutionWarning
from reeb_sandwich.oracle import _check_separation, _Grid, _NeedsResolution, compare_graphs, oracle_reeb_graph
from reeb_sandwich.reeb import VertexType, build_reeb_graph, graph_invariants

from family import safe_config
from helpers import FIXTURES, specs, sweep

SEEDS = range(20)


def _oracle(name, nx=4096):
    cfg, c1, c2 = specs(name)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResolutionWarning)
        return oracle_reeb_graph(c1, c2, cfg.interval, nx=nx, m=cfg.m)


@pytest.mark.parametrize("name", FIXTURES)
def test_fixture_matches_sweep(name):
    report = compare_graphs(sweep(name), _oracle(name))
    assert report.equal, report.discrepancy


@pytest.mark.parametrize("seed", SEEDS)
def test_random_pair_matches_sweep(seed):
    cfg = safe_config(seed)
    c1, c2 = cfg.build_specs()
    g = build_reeb_graph(c1, c2, cfg.interval)
    report = compare_graphs(g, oracle_reeb_graph(c1, c2, cfg.interval))
    assert report.equal, report.discrepancy


@pytest.mark.parametrize("name", FIXTURES)
def test_invariants_stable_under_refinement(name):
    a, b = _oracle(name, 4096), _oracle(name, 8192)
    assert graph_invariants(a) == graph_invariants(b)


def test_report_names_the_first_difference():
    g = sweep("example2_t0_0.5")
    top = next(v for v in g.vertices if v.type is VertexType.MAX)
    moved = replace(g, vertices=tuple(replace(v, level=v.level + 1e-3) if v is top else v for v in g.vertices))
    report = compare_graphs(g, moved)
    assert not report and "Max vertex level" in report.discrepancy
    assert compare_graphs(g, moved, level_tol=1e-2)
    other = compare_graphs(g, sweep("thm4_parabolas"))
    assert not other.equal and other.discrepancy.startswith("vertices_by_type")
    assert other.to_dict() == {"equal": False, "discrepancy": other.discrepancy}


def test_nearby_event_levels_force_refinement():
    cfg, c1, c2 = specs("example2_t0_0.5")
    grid = _Grid(c1, c2, cfg.interval, 2048)
    _check_separation(grid, [0.5, 1.0], cfg.level_merge_tol)
    with pytest.raises(_NeedsResolution, match="spans two event levels"):
        _check_separation(grid, [0.5 - 1e-6, 0.5, 1.0], cfg.level_merge_tol)


def test_refinement_is_reported():
    cfg, c1, c2 = specs("example4_surrogate")
    with pytest.warns(ResolutionWarning, match="doubling nx"):
        g = oracle_reeb_graph(c1, c2, cfg.interval, nx=2048, m=cfg.m)
    assert compare_graphs(sweep("example4_surrogate"), g)


def test_rejects_coarse_grids():
    cfg, c1, c2 = specs("thm4_parabolas")
    with pytest.raises(ValueError):
        oracle_reeb_graph(c1, c2, cfg.interval, nx=100)


def test_whole_line_components_double_for_m_two():
    cfg, c1, c2 = specs("example1_1")
    for m in (2, 3):
        assert compare_graphs(build_reeb_graph(c1, c2, cfg.interval, m), oracle_reeb_graph(c1, c2, cfg.interval, m=m))


def test_grid_runs_contain_the_exact_components():
    cfg, c1, c2 = specs("example2_t0_0.5")
    grid = _Grid(c1, c2, cfg.interval, 4096)
    runs = grid.runs(0.25)
    assert len(runs) == 2
    spans = [(grid.x[a], grid.x[b + 1]) for a, b in runs]
    assert spans[0][0] <= -np.sqrt(3) and spans[0][1] >= -1
    assert spans[1][0] <= 1 and spans[1][1] >= np.sqrt(3)
