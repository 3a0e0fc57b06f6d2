"""Reeb graphs of planar regions sandwiched between two curves.

The region ``{(x, t) : c1(x) <= t <= c2(x)}`` is swept by horizontal levels;
the resulting graph describes how the level sets of the height function on
the associated surface split and merge.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .classify import Kind, Verdict, classify
from .config import AnalysisConfig, load_config, load_fixture
from .funcspec import FunctionSpec, Side, TailDeclaration, validate_pair, verify_declarations
from .oracle import compare_graphs, oracle_reeb_graph
from .reeb import ReebGraph, build_reeb_graph, graph_invariants, level_components
from .surface import critical_correspondence, verify_manifold

__all__ = [
    "AnalysisConfig",
    "FunctionSpec",
    "Kind",
    "ReebGraph",
    "Side",
    "TailDeclaration",
    "Verdict",
    "build_reeb_graph",
    "classify",
    "compare_graphs",
    "critical_correspondence",
    "graph_invariants",
    "level_components",
    "load_config",
    "load_fixture",
    "oracle_reeb_graph",
    "validate_pair",
    "verify_declarations",
    "verify_manifold",
]
