"""Command-line entry point and the end-to-end analysis pipeline.

Exit codes: 0 success, 2 validation error, 3 certification or ambiguity
error, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .classify import Verdict, classify
from .config import AnalysisConfig, fixture_names, resolve
from .emit import SCHEMA, dumps_json, emit_dot, render_svg, write_outputs, write_text
from .errors import ReebSandwichError
from .funcspec import (
    DeclarationReport,
    FunctionSpec,
    OrderCertificate,
    validate_pair,
    verify_declarations,
)
from .oracle import ComparisonReport, compare_graphs, oracle_reeb_graph
from .reeb import GraphInvariants, ReebGraph, build_reeb_graph, graph_invariants
from .surface import CorrespondenceReport, ManifoldReport, critical_correspondence, verify_manifold

EXIT_OK, EXIT_VALIDATION, EXIT_CERTIFICATION, EXIT_IO = 0, 2, 3, 4


# -----------------------------------------------------------------------------
# pipeline
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class RunBundle:
    config: AnalysisConfig
    c1: FunctionSpec
    c2: FunctionSpec
    order: OrderCertificate
    declarations: tuple[DeclarationReport, DeclarationReport]
    manifold: ManifoldReport
    correspondence: CorrespondenceReport
    graph: ReebGraph
    invariants: GraphInvariants
    verdict: Verdict
    oracle: Optional[ComparisonReport] = None
    warnings: tuple[str, ...] = field(default=())

    @property
    def final_graph(self) -> ReebGraph:
        """The sweep graph after window truncations were reclassified as ends."""
        return self.verdict.graph if self.verdict.graph is not None else self.graph

    def document(self) -> dict:
        return {
            "schema": SCHEMA,
            "config": self.config.to_dict(),
            "functions": {f.name: _function_echo(f) for f in (self.c1, self.c2)},
            "critical_points": {f.name: [p.to_dict() for p in f.critical_points] for f in (self.c1, self.c2)},
            "event_levels": list(self.graph.events),
            "t_range": None if self.graph.t_range is None else self.graph.t_range.as_list(),
            "graph": self.final_graph.to_dict(),
            "invariants": graph_invariants(self.final_graph).to_dict(),
            "verdict": self.verdict.kind.value,
            "classification": self.verdict.to_dict(),
            "certificates": {
                "order": self.order.to_dict(),
                "declarations": {r.function: r.to_dict() for r in self.declarations},
                "manifold": self.manifold.to_dict(),
                "correspondence": self.correspondence.to_dict(),
                "oracle": None if self.oracle is None else self.oracle.to_dict(),
            },
            "warnings": list(self.warnings),
        }

    def renderings(self) -> dict[str, str]:
        return {
            "json": dumps_json(self.document()),
            "dot": emit_dot(self.final_graph, self.config.name),
            "svg": plot_svg(self.config, self.c1, self.c2, self.final_graph),
        }

    def summary(self) -> str:
        inv = graph_invariants(self.final_graph)
        types = ", ".join(f"{k}:{n}" for k, n in inv.vertices_by_type) or "none"
        ends = ", ".join(f"{k}:{n}" for k, n in inv.terminations) or "none"
        lines = [
            f"{self.config.name}: {self.verdict.kind.value}",
            f"  basis: {', '.join(self.verdict.basis) or '-'}",
            f"  vertices: {types}",
            f"  edges: {inv.e_compact} compact / {inv.e_total} total; terminations: {ends}; b1={inv.b1}",
            f"  manifold: {'PASS' if self.manifold.passed else 'FAIL'} (min |grad| {self.manifold.min_norm:.3g})",
            f"  correspondence: {'MATCH' if self.correspondence.ok else 'MISMATCH'}",
        ]
        if self.oracle is not None:
            lines.append(f"  oracle: {'equal' if self.oracle.equal else self.oracle.discrepancy}")
        if self.verdict.missing:
            lines.append(f"  missing: {', '.join(self.verdict.missing)}")
        for w in self.warnings:
            lines.append(f"  warning: {w}")
        return "\n".join(lines)


def _function_echo(f: FunctionSpec) -> dict:
    d = f.to_dict()
    d.pop("critical_points")
    return d


def plot_svg(config: AnalysisConfig, c1: FunctionSpec, c2: FunctionSpec, g: ReebGraph) -> str:
    levels = sorted({v.level for v in g.vertices})
    return render_svg(c1, c2, config.interval, levels, title=config.name)


def run_analyze(config: AnalysisConfig) -> RunBundle:
    """Validate the pair, certify the surface, sweep, classify."""
    notes: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        c1, c2 = config.build_specs()
        order = validate_pair(c1, c2, config.interval)
        reports = (verify_declarations(c1, config.interval), verify_declarations(c2, config.interval))
        for r in reports:
            notes += [f"{r.function} {i.side.value} {i.check}: {i.detail}" for i in r.items if i.status == "warn"]
        manifold = verify_manifold(c1, c2, config.m, config.manifold_samples, config.interval, config.seed)
        corr = critical_correspondence(c1, c2, config.m, config.interval)
        g = build_reeb_graph(c1, c2, config.interval, config.m, config.root_tol, config.level_merge_tol)
        verdict = classify(c1, c2, g, config.interval)
        comparison = None
        if config.oracle_enabled:
            o = oracle_reeb_graph(c1, c2, config.interval, config.oracle_nx, g.events, config.m, config.level_merge_tol)
            comparison = compare_graphs(g, o)
    notes += [str(w.message) for w in caught]
    return RunBundle(
        config, c1, c2, order, reports, manifold, corr, g, graph_invariants(g), verdict, comparison, tuple(notes)
    )


# -----------------------------------------------------------------------------
# command line
# -----------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", metavar="PATH", help="analysis config (JSON)")
    src.add_argument("--fixture", metavar="NAME", help=f"bundled config: {', '.join(fixture_names())}")
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--window", nargs=2, metavar=("A", "B"), help="override the x-window")
    common.add_argument("--m", type=int, metavar="K", help="override the sphere dimension parameter m")
    common.add_argument("--dry-run", action="store_true", help="print a summary, write no files")

    p = argparse.ArgumentParser(prog="reeb-sandwich", description="Reeb graphs of regions between two curves.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", parents=[common], help="full pipeline; writes run.json, graph.dot, plot.svg")
    a.add_argument("--oracle", action="store_true", help="also build the raster oracle and compare")
    sub.add_parser("reeb", parents=[common], help="sweep graph as DOT and invariants")
    sub.add_parser("classify", parents=[common], help="verdict with certificates")
    sub.add_parser("critical-points", parents=[common], help="certified critical points of c1 and c2")
    o = sub.add_parser("oracle", parents=[common], help="raster oracle graph compared with the sweep")
    o.add_argument("--nx", type=int, help="initial raster resolution")
    v = sub.add_parser("verify-manifold", parents=[common], help="gradient check and critical correspondence")
    v.add_argument("--samples", type=int, help="number of sampled points")
    sub.add_parser("plot", parents=[common], help="SVG plot of the region")
    return p


def _load(args) -> AnalysisConfig:
    cfg = resolve(args.config, args.fixture)
    cfg = cfg.with_overrides(window=args.window, m=args.m)
    d = cfg.to_dict()
    if getattr(args, "oracle", False):
        d["oracle"]["enabled"] = True
    if getattr(args, "nx", None) is not None:
        d["oracle"]["nx"] = args.nx
    if getattr(args, "samples", None) is not None:
        d["manifold"]["samples"] = args.samples
    return AnalysisConfig.from_dict(d)


def _emit(args, name: str, text: str):
    """Write ``text`` into ``--out`` (unless dry-run) or print it."""
    if args.out and not args.dry_run:
        path = write_text(Path(args.out) / name, text)
        print(path)
    else:
        sys.stdout.write(text)


def _cmd_analyze(args, cfg: AnalysisConfig) -> int:
    bundle = run_analyze(cfg)
    print(bundle.summary())
    if not args.dry_run:
        out = Path(args.out) if args.out else Path("reeb-out") / cfg.name
        for path in write_outputs(bundle.renderings(), out, cfg.outputs):
            print(f"wrote {path}")
    if bundle.oracle is not None and not bundle.oracle.equal:
        return EXIT_CERTIFICATION
    return EXIT_OK


def _cmd_reeb(args, cfg: AnalysisConfig) -> int:
    c1, c2 = cfg.build_specs()
    validate_pair(c1, c2, cfg.interval)
    g = build_reeb_graph(c1, c2, cfg.interval, cfg.m, cfg.root_tol, cfg.level_merge_tol)
    if args.dry_run:
        print(dumps_json(graph_invariants(g).to_dict()), end="")
    else:
        _emit(args, "graph.dot", emit_dot(g, cfg.name))
    return EXIT_OK


def _cmd_classify(args, cfg: AnalysisConfig) -> int:
    c1, c2 = cfg.build_specs()
    validate_pair(c1, c2, cfg.interval)
    for f in (c1, c2):
        verify_declarations(f, cfg.interval)
    g = build_reeb_graph(c1, c2, cfg.interval, cfg.m, cfg.root_tol, cfg.level_merge_tol)
    verdict = classify(c1, c2, g, cfg.interval)
    doc = verdict.to_dict()
    doc["invariants"] = graph_invariants(verdict.graph or g).to_dict()
    _emit(args, "verdict.json", dumps_json(doc))
    return EXIT_OK


def _cmd_critical_points(args, cfg: AnalysisConfig) -> int:
    c1, c2 = cfg.build_specs()
    doc = {f.name: [p.to_dict() for p in f.critical_points] for f in (c1, c2)}
    _emit(args, "critical_points.json", dumps_json(doc))
    return EXIT_OK


def _cmd_oracle(args, cfg: AnalysisConfig) -> int:
    c1, c2 = cfg.build_specs()
    validate_pair(c1, c2, cfg.interval)
    g = build_reeb_graph(c1, c2, cfg.interval, cfg.m, cfg.root_tol, cfg.level_merge_tol)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        o = oracle_reeb_graph(c1, c2, cfg.interval, cfg.oracle_nx, g.events, cfg.m, cfg.level_merge_tol)
    report = compare_graphs(g, o)
    doc = {
        "sweep": graph_invariants(g).to_dict(),
        "oracle": graph_invariants(o).to_dict(),
        "comparison": report.to_dict(),
        "warnings": [str(w.message) for w in caught],
    }
    _emit(args, "oracle.json", dumps_json(doc))
    return EXIT_OK if report.equal else EXIT_CERTIFICATION


def _cmd_verify_manifold(args, cfg: AnalysisConfig) -> int:
    c1, c2 = cfg.build_specs()
    validate_pair(c1, c2, cfg.interval)
    manifold = verify_manifold(c1, c2, cfg.m, cfg.manifold_samples, cfg.interval, cfg.seed)
    corr = critical_correspondence(c1, c2, cfg.m, cfg.interval)
    _emit(args, "manifold.json", dumps_json({"manifold": manifold.to_dict(), "correspondence": corr.to_dict()}))
    return EXIT_OK if manifold.passed and corr.ok else EXIT_CERTIFICATION


def _cmd_plot(args, cfg: AnalysisConfig) -> int:
    c1, c2 = cfg.build_specs()
    g = build_reeb_graph(c1, c2, cfg.interval, cfg.m, cfg.root_tol, cfg.level_merge_tol)
    _emit(args, "plot.svg", plot_svg(cfg, c1, c2, g))
    return EXIT_OK


COMMANDS = {
    "analyze": _cmd_analyze,
    "reeb": _cmd_reeb,
    "classify": _cmd_classify,
    "critical-points": _cmd_critical_points,
    "oracle": _cmd_oracle,
    "verify-manifold": _cmd_verify_manifold,
    "plot": _cmd_plot,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = _load(args)
        return COMMANDS[args.command](args, cfg)
    except ReebSandwichError as exc:
        print(f"error [{exc.stage}] {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
