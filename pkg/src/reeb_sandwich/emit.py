"""Serialisation of a run: JSON document, DOT graph and SVG plot.

All three are byte-deterministic: keys are sorted, floats are written with a
fixed format, and nothing depends on time or object identity.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .funcspec import FunctionSpec
from .reeb import End, EndKind, ReebGraph

SCHEMA = "reeb-sandwich/1"


# -----------------------------------------------------------------------------
# JSON
# -----------------------------------------------------------------------------

def jsonable(obj):
    """Plain JSON data: infinities become ``"+inf"``/``"-inf"``, NaN becomes null."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "+inf" if v > 0 else "-inf"
        return v
    if hasattr(obj, "value") and isinstance(obj.value, str):  # str enums
        return obj.value
    return obj


def dumps_json(doc: dict) -> str:
    return json.dumps(jsonable(doc), sort_keys=True, indent=2, allow_nan=False) + "\n"


# -----------------------------------------------------------------------------
# DOT
# -----------------------------------------------------------------------------

def format_level(t: float) -> str:
    # rounding hides cluster-mean noise such as 1e-24 at a level that is 0
    s = f"{round(t, 10):.6g}"
    return "0" if s == "-0" else s


_PHANTOM_STYLE = {
    EndKind.DECLARED: 'shape=point, width=0.08, color="black"',
    EndKind.TRUNCATION: 'shape=square, style=dashed, label="", width=0.12, height=0.12, color="gray40"',
}


def emit_dot(g: ReebGraph, name: str = "reeb") -> str:
    """Digraph with vertices labelled ``type@level`` and edges pointing upward.

    Declared ends and window truncations are phantom nodes with distinct
    styles, joined to the graph by dashed stubs.
    """
    lines = [f'digraph "{name}" {{', "  rankdir=BT;", '  node [shape=ellipse, fontname="Helvetica"];']
    for v in sorted(g.vertices, key=lambda v: v.id):
        lines.append(f'  v{v.id} [label="{v.type.value}@{format_level(v.level)}"];')

    def node(end: End, eid: int, tag: str) -> str:
        if end.kind is EndKind.VERTEX:
            return f"v{end.vertex}"
        pid = f"{end.kind.value.lower()}{eid}{tag}"
        side = "" if end.side is None else f", tooltip=\"{end.side.value}\""
        lines.append(f'  {pid} [label="", {_PHANTOM_STYLE[end.kind]}{side}];')
        return pid

    for e in sorted(g.edges, key=lambda e: e.id):
        a = node(e.lower, e.id, "lo")
        b = node(e.upper, e.id, "hi")
        style = "solid" if e.compact else "dashed"
        lines.append(f"  {a} -> {b} [style={style}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -----------------------------------------------------------------------------
# SVG
# -----------------------------------------------------------------------------

_W, _H, _PAD = 800, 500, 50


def _num(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def _segments(xs: np.ndarray, ys: np.ndarray) -> list[np.ndarray]:
    ok = np.isfinite(ys)
    out, start = [], None
    for i, good in enumerate(ok):
        if good and start is None:
            start = i
        if not good and start is not None:
            out.append(np.arange(start, i))
            start = None
    if start is not None:
        out.append(np.arange(start, len(ok)))
    return [s for s in out if s.size > 1]


def _values(f: FunctionSpec, xs: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        try:
            return np.asarray(f.values(xs), dtype=float)
        except ArithmeticError:
            return np.array([_safe(f, x) for x in xs])


def _safe(f: FunctionSpec, x: float) -> float:
    try:
        return float(f(x))
    except ArithmeticError:
        return math.nan


def render_svg(
    c1: FunctionSpec,
    c2: FunctionSpec,
    window,
    levels: Iterable[float] = (),
    title: str = "",
    samples: int = 801,
) -> str:
    """SVG 1.1 plot of both curves, the closed region between them, critical
    points and the given levels as horizontal rules."""
    lo, hi = float(window.lo), float(window.hi)
    xs = np.linspace(lo, hi, samples)
    y1, y2 = _values(c1, xs), _values(c2, xs)
    levels = sorted(set(float(t) for t in levels))
    finite = np.concatenate([y1[np.isfinite(y1)], y2[np.isfinite(y2)], np.asarray(levels, dtype=float)])
    ymin, ymax = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    if ymax - ymin < 1e-12:
        ymin, ymax = ymin - 0.5, ymax + 0.5
    margin = 0.05 * (ymax - ymin)
    ymin, ymax = ymin - margin, ymax + margin

    def px(x):
        return _PAD + (np.asarray(x) - lo) / (hi - lo) * (_W - 2 * _PAD)

    def py(y):
        return _H - _PAD - (np.asarray(y) - ymin) / (ymax - ymin) * (_H - 2 * _PAD)

    def path(ix, ys):
        return " ".join(f"{_num(a)},{_num(b)}" for a, b in zip(px(xs[ix]), py(ys[ix])))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{_PAD}" y="{_PAD - 20}" font-family="Helvetica" font-size="14">{_escape(title)}</text>')

    both = np.isfinite(y1) & np.isfinite(y2)
    for ix in _segments(xs, np.where(both, 0.0, np.nan)):
        upper = path(ix, y2)
        lower = path(ix[::-1], y1)
        out.append(f'<polygon points="{upper} {lower}" class="region" fill="#9ecae1" fill-opacity="0.5" stroke="none"/>')

    for t in levels:
        y = _num(float(py(t)))
        out.append(
            f'<line class="level" x1="{_PAD}" y1="{y}" x2="{_W - _PAD}" y2="{y}" stroke="#777777" '
            f'stroke-width="0.8" stroke-dasharray="4,3"/>'
        )
        out.append(
            f'<text x="{_W - _PAD + 4}" y="{y}" font-family="Helvetica" font-size="10" '
            f'dominant-baseline="middle">t={format_level(t)}</text>'
        )

    for ys, colour, label in ((y1, "#d62728", "c1"), (y2, "#1f77b4", "c2")):
        for ix in _segments(xs, ys):
            out.append(
                f'<polyline class="{label}" points="{path(ix, ys)}" fill="none" stroke="{colour}" stroke-width="1.5"/>'
            )

    for f, colour in ((c1, "#d62728"), (c2, "#1f77b4")):
        for p in f.critical_points:
            if lo <= p.x <= hi and math.isfinite(p.value):
                out.append(
                    f'<circle class="critical" cx="{_num(float(px(p.x)))}" cy="{_num(float(py(p.value)))}" r="3" '
                    f'fill="{colour}" stroke="black" stroke-width="0.5"/>'
                )

    # axes frame and tick labels
    out.append(
        f'<rect x="{_PAD}" y="{_PAD}" width="{_W - 2 * _PAD}" height="{_H - 2 * _PAD}" '
        f'fill="none" stroke="black" stroke-width="1"/>'
    )
    for x in (lo, hi):
        out.append(
            f'<text x="{_num(float(px(x)))}" y="{_H - _PAD + 16}" font-family="Helvetica" font-size="10" '
            f'text-anchor="middle">{format_level(x)}</text>'
        )
    for y in (ymin + margin, ymax - margin):
        out.append(
            f'<text x="{_PAD - 4}" y="{_num(float(py(y)))}" font-family="Helvetica" font-size="10" '
            f'text-anchor="end" dominant-baseline="middle">{format_level(y)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


# -----------------------------------------------------------------------------
# files
# -----------------------------------------------------------------------------

FILENAMES = {"json": "run.json", "dot": "graph.dot", "svg": "plot.svg"}


def write_text(path: Path, text: str) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc
    return path


def write_outputs(texts: dict[str, str], out_dir, kinds: Optional[Iterable[str]] = None) -> list[Path]:
    """Write the selected renderings (``json``, ``dot``, ``svg``) into ``out_dir``."""
    out_dir = Path(out_dir)
    kinds = list(texts) if kinds is None else list(kinds)
    return [write_text(out_dir / FILENAMES[k], texts[k]) for k in kinds if k in texts]
