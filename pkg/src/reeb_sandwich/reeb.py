"""Reeb digraph of the height function by an event sweep over levels.

The fiber of the height over level ``t`` is, up to the sphere factor of the
``y`` coordinates, the planar interlevel set ``S(t) = {x : c1(x) <= t <= c2(x)}``.
As ``t`` grows the sublevel set ``{c1 <= t}`` grows and the superlevel set
``{c2 >= t}`` shrinks, so minima of ``c1`` give births, maxima of ``c1``
merges, minima of ``c2`` splits and maxima of ``c2`` deaths.

Components of ``S(t)`` are computed piecewise on monotone pieces of ``c1``
and ``c2`` (between consecutive critical points), so each piece contributes
at most one root. Between consecutive event levels the combinatorics are
constant; the sweep samples each slab at its midpoint. A slab component is
linked to the event-level component containing its limit: each endpoint is
a root on one fixed monotone piece throughout the slab, so the limit is the
root on that piece at the event level. (Plain overlap of the midpoint
interval with the event interval is not enough: components drift with t.)
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
from scipy import optimize

from . import expr as ex
from .errors import ReebConsistencyError, RootAmbiguity
from .expr import Interval
from .funcspec import LEVEL_MERGE_TOL, ROOT_TOL, FunctionSpec, Side, tails_inside_level


class Carrier(str, Enum):
    CURVE1 = "Curve1"
    CURVE2 = "Curve2"
    WINDOW = "WindowEdge"


class VertexType(str, Enum):
    MIN = "Min"
    MAX = "Max"
    MERGE = "Merge"
    SPLIT = "Split"
    DEGREE2 = "Degree2Critical"


class EndKind(str, Enum):
    VERTEX = "Vertex"
    DECLARED = "DeclaredEnd"
    TRUNCATION = "WindowTruncation"


@dataclass(frozen=True)
class ComponentInterval:
    lo: float
    hi: float
    lo_carrier: Carrier
    hi_carrier: Carrier
    tracks: int = 1
    # index of the monotone piece of the carrier curve holding each endpoint root
    lo_piece: Optional[int] = field(default=None, compare=False, repr=False)
    hi_piece: Optional[int] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not self.lo <= self.hi:
            raise ValueError(f"empty component [{self.lo}, {self.hi}]")

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def meets(self, other: "ComponentInterval", slack: float = 0.0) -> bool:
        return self.lo <= other.hi + slack and other.lo <= self.hi + slack

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "lo_carrier": self.lo_carrier.value,
            "hi_carrier": self.hi_carrier.value,
            "tracks": self.tracks,
        }


@dataclass(frozen=True)
class LevelComponents:
    t: float
    components: tuple[ComponentInterval, ...]

    def __len__(self) -> int:
        return len(self.components)

    @property
    def contour_count(self) -> int:
        return sum(c.tracks for c in self.components)

    def signature(self) -> tuple:
        """Combinatorial type: count, tracks and carrier pattern."""
        return tuple((c.lo_carrier, c.hi_carrier, c.tracks, c.is_point) for c in self.components)


@dataclass(frozen=True)
class Witness:
    curve: int
    s: float

    def to_dict(self) -> dict:
        return {"curve": f"Curve{self.curve}", "s": self.s}


@dataclass(frozen=True)
class ReebVertex:
    id: int
    level: float
    type: VertexType
    witnesses: tuple[Witness, ...]
    component: ComponentInterval

    @property
    def x(self) -> float:
        return self.witnesses[0].s

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "level": self.level,
            "type": self.type.value,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "component": self.component.to_dict(),
        }


@dataclass(frozen=True)
class End:
    kind: EndKind
    level: float
    vertex: Optional[int] = None
    side: Optional[Side] = None  # x-side of a window truncation / declared end
    x: Optional[float] = None

    def to_dict(self) -> dict:
        d = {"kind": self.kind.value, "level": self.level}
        if self.vertex is not None:
            d["vertex"] = self.vertex
        if self.side is not None:
            d["side"] = self.side.value
        if self.x is not None:
            d["x"] = self.x
        return d


@dataclass(frozen=True)
class ReebEdge:
    id: int
    lower: End
    upper: End
    breadcrumbs: tuple[tuple[float, ComponentInterval], ...] = field(default=(), repr=False)

    @property
    def compact(self) -> bool:
        return self.lower.kind is EndKind.VERTEX and self.upper.kind is EndKind.VERTEX

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "lower": self.lower.to_dict(),
            "upper": self.upper.to_dict(),
            "compact": self.compact,
            "breadcrumbs": [[t, c.to_dict()] for t, c in self.breadcrumbs],
        }


@dataclass(frozen=True)
class ReebGraph:
    vertices: tuple[ReebVertex, ...]
    edges: tuple[ReebEdge, ...]
    window: Interval
    m: int
    events: tuple[float, ...] = ()
    t_range: Optional[Interval] = None
    source: str = "sweep"

    def vertex(self, vid: int) -> ReebVertex:
        return next(v for v in self.vertices if v.id == vid)

    def degree(self, vid: int) -> tuple[int, int]:
        """(lower, upper) incidence counts of a vertex."""
        lower = sum(1 for e in self.edges if e.upper.vertex == vid)
        upper = sum(1 for e in self.edges if e.lower.vertex == vid)
        return lower, upper

    def with_edges(self, edges) -> "ReebGraph":
        return ReebGraph(self.vertices, tuple(edges), self.window, self.m, self.events, self.t_range, self.source)

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "window": self.window.as_list(),
            "m": self.m,
            "events": list(self.events),
            "t_range": None if self.t_range is None else self.t_range.as_list(),
            "vertices": [v.to_dict() for v in self.vertices],
            "edges": [e.to_dict() for e in self.edges],
        }


# -----------------------------------------------------------------------------
# level sets
# -----------------------------------------------------------------------------

def _as_window(c1: FunctionSpec, window) -> Interval:
    if window is None:
        return c1.window
    return window if isinstance(window, Interval) else Interval(*window)


class _Pieces:
    """Monotone pieces of one function on the window with endpoint values."""

    def __init__(self, f: FunctionSpec, window: Interval):
        xs = [window.lo] + [p.x for p in f.critical_points if window.lo < p.x < window.hi] + [window.hi]
        self.x = np.unique(np.asarray(xs, dtype=float))
        self.v = np.array([f(x) for x in self.x])
        self.fn = ex.compile_scalar(f.expr)
        self.window = window

    def extremes(self) -> tuple[float, float]:
        return float(self.v.min()), float(self.v.max())

    def root(self, i: int, t: float, root_tol: float) -> float:
        return optimize.brentq(
            lambda s: self.fn(s) - t, self.x[i], self.x[i + 1], xtol=root_tol, rtol=4 * np.finfo(float).eps
        )

    def limit_root(self, i: int, t: float, snap: float, root_tol: float) -> float:
        """Where the root of ``f = t`` on piece ``i`` sits at level ``t``, clamped to the piece."""
        a, b, va, vb = self.x[i], self.x[i + 1], self.v[i], self.v[i + 1]
        if abs(va - t) <= snap:
            return a
        if abs(vb - t) <= snap:
            return b
        if (va - t) * (vb - t) < 0:
            return self.root(i, t, root_tol)
        return a if abs(va - t) < abs(vb - t) else b


def _sublevel(p: _Pieces, t: float, curve: Carrier, snap: float, root_tol: float, sign: float):
    """Intervals of ``{sign * f <= sign * t}`` as (lo, hi, lo_carrier, hi_carrier)."""
    v = np.where(np.abs(p.v - t) <= snap, t, p.v) * sign
    ts = sign * t
    out: list[list] = []
    x, lo_w, hi_w = p.x, p.window.lo, p.window.hi

    def carrier(pos: float, val: float) -> Carrier:
        if (pos == lo_w or pos == hi_w) and val < ts:
            return Carrier.WINDOW
        return curve

    def add(a, b, ca, cb, i):
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1][1], out[-1][3] = b, (cb, i)
            return
        out.append([a, b, (ca, i), (cb, i)])

    if x.size == 1:
        if v[0] <= ts:
            add(x[0], x[0], carrier(x[0], v[0]), carrier(x[0], v[0]), 0)
        return out
    for i in range(x.size - 1):
        a, b, va, vb = x[i], x[i + 1], v[i], v[i + 1]
        lo_v, hi_v = min(va, vb), max(va, vb)
        if hi_v <= ts:
            add(a, b, carrier(a, va), carrier(b, vb), i)
        elif lo_v > ts:
            continue
        elif lo_v == ts:
            pt = a if va <= vb else b
            add(pt, pt, curve, curve, i)
        else:
            if hi_v - lo_v <= root_tol:
                raise RootAmbiguity(f"flat piece [{a!r}, {b!r}] of {curve.value} straddles t={t!r}")
            r = p.root(i, t, root_tol)
            if va < vb:
                add(a, r, carrier(a, va), curve, i)
            else:
                add(r, b, curve, carrier(b, vb), i)
    return out


def _intersect(A, B) -> list[ComponentInterval]:
    out = []
    i = j = 0
    while i < len(A) and j < len(B):
        a, b = A[i], B[j]
        lo, hi = max(a[0], b[0]), min(a[1], b[1])
        if lo <= hi:
            lo_c, lo_p = _pick(a, b, 0, 2, larger=True)
            hi_c, hi_p = _pick(a, b, 1, 3, larger=False)
            out.append(ComponentInterval(lo, hi, lo_c, hi_c, lo_piece=lo_p, hi_piece=hi_p))
        if a[1] < b[1]:
            i += 1
        else:
            j += 1
    return out


def _pick(a, b, k, c, larger: bool) -> tuple[Carrier, int]:
    if a[k] == b[k]:
        curves = [x for x in (a[c], b[c]) if x[0] is not Carrier.WINDOW]
        return curves[0] if curves else a[c]
    first = a if (a[k] > b[k]) == larger else b
    return first[c]


def whole_line_declared(c1: FunctionSpec, c2: FunctionSpec, t: float) -> bool:
    """Per declarations, both tails lie strictly inside S(t)."""
    return tails_inside_level(c1, c2, t, Side.NEG, strict=True) and tails_inside_level(
        c1, c2, t, Side.POS, strict=True
    )


def level_components(
    c1: FunctionSpec,
    c2: FunctionSpec,
    t: float,
    window=None,
    *,
    m: int = 3,
    root_tol: float = ROOT_TOL,
    snap: float = LEVEL_MERGE_TOL,
    _pieces: Optional[tuple[_Pieces, _Pieces]] = None,
) -> LevelComponents:
    """Connected components of ``{x in window : c1(x) <= t <= c2(x)}``.

    Piece endpoint values (critical values and window-edge values) within
    ``snap`` of ``t`` are treated as equal to ``t``.
    """
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    window = _as_window(c1, window)
    p1, p2 = _pieces or (_Pieces(c1.with_window(window), window), _Pieces(c2.with_window(window), window))
    A = _sublevel(p1, t, Carrier.CURVE1, snap, root_tol, 1.0)
    B = _sublevel(p2, t, Carrier.CURVE2, snap, root_tol, -1.0)
    comps = _intersect(A, B)
    if m == 2 and len(comps) == 1:
        c = comps[0]
        whole = (
            c.lo == window.lo
            and c.hi == window.hi
            and c.lo_carrier is Carrier.WINDOW
            and c.hi_carrier is Carrier.WINDOW
        )
        no_touch = p1.extremes()[1] < t - snap and p2.extremes()[0] > t + snap
        if whole and no_touch and whole_line_declared(c1, c2, t):
            comps = [ComponentInterval(c.lo, c.hi, c.lo_carrier, c.hi_carrier, tracks=2)]
    return LevelComponents(t, tuple(comps))


# -----------------------------------------------------------------------------
# sweep
# -----------------------------------------------------------------------------

def merge_levels(values, tol: float = LEVEL_MERGE_TOL) -> list[float]:
    """Sort and merge values closer than ``tol`` into clusters, represented by their mean."""
    vals = sorted(float(v) for v in values)
    clusters: list[list[float]] = []
    for v in vals:
        if clusters and v - clusters[-1][0] <= tol:
            clusters[-1].append(v)
        else:
            clusters.append([v])
    return [float(np.mean(c)) for c in clusters]


def event_levels(c1: FunctionSpec, c2: FunctionSpec, window=None, tol: float = LEVEL_MERGE_TOL) -> tuple[list[float], Interval]:
    """Merged event levels and the t-range ``[min c1, max c2]`` over the window."""
    window = _as_window(c1, window)
    c1, c2 = c1.with_window(window), c2.with_window(window)
    raw1 = [p.value for p in c1.critical_points] + [c1(window.lo), c1(window.hi)]
    raw2 = [p.value for p in c2.critical_points] + [c2(window.lo), c2(window.hi)]
    t_range = Interval(min(raw1), max(raw2))
    raw = [v for v in raw1 + raw2 if t_range.lo <= v <= t_range.hi]
    return merge_levels(raw + [t_range.lo, t_range.hi], tol), t_range


def witnesses_at(c1: FunctionSpec, c2: FunctionSpec, level: float, comp: ComponentInterval, tol: float, slack: float) -> list[Witness]:
    out = []
    for curve, f in ((1, c1), (2, c2)):
        for p in f.critical_points:
            if abs(p.value - level) <= tol and comp.lo - slack <= p.x <= comp.hi + slack:
                out.append(Witness(curve, p.x))
    return out


def vertex_type(lower: int, upper: int) -> VertexType:
    if lower == 0:
        return VertexType.MIN
    if upper == 0:
        return VertexType.MAX
    if lower == 1 and upper == 1:
        return VertexType.DEGREE2
    if upper == 1:
        return VertexType.MERGE
    if lower == 1:
        return VertexType.SPLIT
    return VertexType.SPLIT if upper >= lower else VertexType.MERGE


def edge_side(comp: ComponentInterval, window: Interval) -> Optional[Side]:
    if comp.lo <= window.lo:
        return Side.NEG
    if comp.hi >= window.hi:
        return Side.POS
    return None


@dataclass
class _Node:
    row: int
    index: int
    track: int
    comp: ComponentInterval
    level: float
    lower: list = field(default_factory=list)  # segment ids
    upper: list = field(default_factory=list)


def _levels_with_retry(c1, c2, t, window, m, root_tol, snap, pieces, jitter):
    try:
        return level_components(c1, c2, t, window, m=m, root_tol=root_tol, snap=snap, _pieces=pieces)
    except RootAmbiguity:
        return level_components(c1, c2, t + jitter, window, m=m, root_tol=root_tol, snap=snap, _pieces=pieces)


def build_reeb_graph(
    c1: FunctionSpec,
    c2: FunctionSpec,
    window=None,
    m: int = 3,
    root_tol: float = ROOT_TOL,
    level_tol: float = LEVEL_MERGE_TOL,
) -> ReebGraph:
    """Sweep event levels bottom to top and contract the level-set graph."""
    if m < 2:
        raise ValueError("m must be at least 2")
    window = _as_window(c1, window)
    c1, c2 = c1.with_window(window), c2.with_window(window)
    pieces = (_Pieces(c1, window), _Pieces(c2, window))
    levels, t_range = event_levels(c1, c2, window, level_tol)

    ev_rows = [
        _levels_with_retry(c1, c2, t, window, m, root_tol, level_tol, pieces, level_tol / 2) for t in levels
    ]
    slab_rows = [
        _levels_with_retry(c1, c2, 0.5 * (a + b), window, m, root_tol, 0.0, pieces, level_tol / 2)
        for a, b in zip(levels[:-1], levels[1:])
    ]

    nodes: list[_Node] = []
    by_row: list[list[_Node]] = []
    for k, row in enumerate(ev_rows):
        here = []
        for i, comp in enumerate(row.components):
            for tr in range(comp.tracks):
                here.append(_Node(k, i, tr, comp, levels[k]))
        nodes += here
        by_row.append(here)

    # segment = one contour track of a slab component, linking an event node below to one above
    segments: list[tuple[_Node, _Node, float, ComponentInterval]] = []
    for k, row in enumerate(slab_rows):
        for comp in row.components:
            for tr in range(comp.tracks):
                lo = _attach(by_row[k], _limit(comp, levels[k], pieces, level_tol, root_tol), tr, levels[k])
                hi = _attach(by_row[k + 1], _limit(comp, levels[k + 1], pieces, level_tol, root_tol), tr, levels[k + 1])
                sid = len(segments)
                segments.append((lo, hi, row.t, comp))
                lo.upper.append(sid)
                hi.lower.append(sid)

    # vertices and terminations
    vertices: list[ReebVertex] = []
    terminal: dict[int, End] = {}
    for node in nodes:
        nl, nu = len(node.lower), len(node.upper)
        wit = witnesses_at(c1, c2, node.level, node.comp, level_tol, root_tol)
        if node.track > 0:
            wit = []  # a doubled whole-line component has no critical points
        if wit:
            vid = len(vertices)
            vertices.append(ReebVertex(vid, node.level, vertex_type(nl, nu), tuple(wit), node.comp))
            terminal[id(node)] = End(EndKind.VERTEX, node.level, vertex=vid)
        elif nl == 1 and nu == 1:
            continue
        elif (nl == 0) != (nu == 0):
            side = edge_side(node.comp, window)
            if side is None:
                raise ReebConsistencyError(
                    f"non-critical birth or death at level {node.level!r} away from the window edge"
                )
            terminal[id(node)] = End(
                EndKind.TRUNCATION, node.level, side=side, x=node.comp.lo if side is Side.NEG else node.comp.hi
            )
        else:
            raise ReebConsistencyError(
                f"non-critical component at level {node.level!r} has {nl} lower and {nu} upper incidences"
            )

    # edges: walk up from every terminal through pass-through nodes
    edges: list[ReebEdge] = []
    for node in nodes:
        start = terminal.get(id(node))
        if start is None:
            continue
        for sid in node.upper:
            crumbs = []
            cur = sid
            while True:
                lo, hi, t, comp = segments[cur]
                crumbs.append((t, comp))
                end = terminal.get(id(hi))
                if end is not None:
                    break
                crumbs.append((hi.level, hi.comp))
                cur = hi.upper[0]
            edges.append(ReebEdge(len(edges), start, end, tuple(crumbs)))
    # components with no terminal at all are impossible: every chain starts at a birth
    return ReebGraph(tuple(vertices), tuple(edges), window, m, tuple(levels), t_range, "sweep")


def _limit(comp: ComponentInterval, level: float, pieces, snap: float, root_tol: float) -> tuple[float, float]:
    """Limit of a slab component as its level tends to an event level.

    Inside a slab each endpoint is a root of one curve on one fixed monotone
    piece (or a fixed window edge), so the limit endpoint is the root on that
    same piece at the event level.
    """
    ends = []
    for pos, car, piece in ((comp.lo, comp.lo_carrier, comp.lo_piece), (comp.hi, comp.hi_carrier, comp.hi_piece)):
        if car is Carrier.WINDOW:
            ends.append(pos)
        else:
            p = pieces[0] if car is Carrier.CURVE1 else pieces[1]
            ends.append(p.limit_root(piece, level, snap, root_tol))
    return ends[0], ends[1]


def _attach(row: list[_Node], limit: tuple[float, float], track: int, level: float) -> _Node:
    lo, hi = limit
    slack = 1e-9 * (1.0 + abs(lo) + abs(hi))
    hits = [
        n for n in row
        if n.comp.lo - slack <= lo and hi <= n.comp.hi + slack and (n.comp.tracks == 1 or n.track == track)
    ]
    if len(hits) != 1:
        raise ReebConsistencyError(
            f"slab component with limit [{lo!r}, {hi!r}] lies in {len(hits)} components at level {level!r}"
        )
    return hits[0]


# -----------------------------------------------------------------------------
# invariants
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class GraphInvariants:
    vertices_by_type: tuple[tuple[str, int], ...]
    vertex_count: int
    e_compact: int
    e_total: int
    terminations: tuple[tuple[str, int], ...]
    b1: int
    core_components: int
    components: int
    vertex_levels: tuple[float, ...]
    degrees: tuple[tuple[int, int], ...]

    def to_dict(self) -> dict:
        return {
            "vertices_by_type": dict(self.vertices_by_type),
            "V": self.vertex_count,
            "E_compact": self.e_compact,
            "E_total": self.e_total,
            "terminations": dict(self.terminations),
            "b1": self.b1,
            "core_components": self.core_components,
            "components": self.components,
            "vertex_levels": list(self.vertex_levels),
            "degrees": [list(d) for d in self.degrees],
        }

    def key(self) -> tuple:
        """Everything except the vertex levels, which are compared with a tolerance."""
        return (
            self.vertices_by_type,
            self.e_compact,
            self.e_total,
            self.terminations,
            self.b1,
            self.components,
            self.degrees,
        )


def _count_components(n: int, pairs) -> int:
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return len({find(i) for i in range(n)})


def graph_invariants(g: ReebGraph) -> GraphInvariants:
    """Canonical comparison key of a Reeb graph.

    ``b1 = E_compact - V + C`` over the compact core (vertices and compact
    edges); ``C`` is the number of core components, 0 for an empty core.
    ``components`` counts connected components of the whole graph, open
    edges included, so a lone open edge has one component.
    """
    types = Counter(v.type.value for v in g.vertices)
    compact = [e for e in g.edges if e.compact]
    ends = Counter()
    for e in g.edges:
        for end in (e.lower, e.upper):
            if end.kind is not EndKind.VERTEX:
                ends[end.kind.value] += 1
    index = {v.id: i for i, v in enumerate(g.vertices)}
    nv = len(g.vertices)
    core = _count_components(nv, [(index[e.lower.vertex], index[e.upper.vertex]) for e in compact])
    # whole graph: vertices plus one extra node per edge
    pairs = []
    for j, e in enumerate(g.edges):
        node = nv + j
        for end in (e.lower, e.upper):
            if end.vertex is not None:
                pairs.append((node, index[end.vertex]))
    whole = _count_components(nv + len(g.edges), pairs)
    degrees = defaultdict(lambda: [0, 0])
    for e in g.edges:
        if e.upper.vertex is not None:
            degrees[e.upper.vertex][0] += 1
        if e.lower.vertex is not None:
            degrees[e.lower.vertex][1] += 1
    return GraphInvariants(
        vertices_by_type=tuple(sorted(types.items())),
        vertex_count=nv,
        e_compact=len(compact),
        e_total=len(g.edges),
        terminations=tuple(sorted(ends.items())),
        b1=len(compact) - nv + core,
        core_components=core,
        components=whole,
        vertex_levels=tuple(sorted(round(v.level, 6) for v in g.vertices)),
        degrees=tuple(sorted(tuple(degrees[v.id]) for v in g.vertices)),
    )
