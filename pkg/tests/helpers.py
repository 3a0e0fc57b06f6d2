"""Shared, cached access to the bundled fixtures."""

from __future__ import annotations

from functools import lru_cache

from reeb_sandwich.config import fixture_names, load_fixture
from reeb_sandwich.reeb import build_reeb_graph

FIXTURES = tuple(fixture_names())


@lru_cache(maxsize=None)
def specs(name: str):
    cfg = load_fixture(name)
    return (cfg, *cfg.build_specs())


@lru_cache(maxsize=None)
def sweep(name: str):
    cfg, c1, c2 = specs(name)
    return build_reeb_graph(c1, c2, cfg.interval, cfg.m, cfg.root_tol, cfg.level_merge_tol)
