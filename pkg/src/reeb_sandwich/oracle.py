"""Brute-force Reeb graph from a rasterisation of the region between the curves.

The x-window is cut into ``nx - 1`` cells. At level ``t`` a cell belongs to
the level set when its interval enclosures admit ``c1 <= t <= c2``; maximal
runs of such cells are the components. Columns of levels are the sweep's
event levels plus slab midpoints, refined adaptively until runs in adjacent
columns overlap one-to-one. Nothing here shares component logic with the
sweep; only the list of event levels is common.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import expr as ex
from .errors import ReebConsistencyError, ResolutionWarning
from .expr import Interval
from .funcspec import ISOLATION_TOL, LEVEL_MERGE_TOL, FunctionSpec, Side
from .reeb import (
    Carrier,
    ComponentInterval,
    End,
    EndKind,
    ReebEdge,
    ReebGraph,
    ReebVertex,
    VertexType,
    Witness,
    event_levels,
    graph_invariants,
    whole_line_declared,
)

MIN_NX = 2048
MAX_NX = 1 << 16
MIN_GAP_CELLS = 4
MAX_REFINE = 40


class _Grid:
    def __init__(self, c1: FunctionSpec, c2: FunctionSpec, window: Interval, nx: int):
        self.window = window
        self.x = np.linspace(window.lo, window.hi, nx)
        lo, hi = self.x[:-1], self.x[1:]
        self.c1_lo, self.c1_hi, _ = ex.eval_interval_array(c1.expr, lo, hi)
        self.c2_lo, self.c2_hi, _ = ex.eval_interval_array(c2.expr, lo, hi)
        self.ncells = nx - 1
        # derivative samples with a ghost point just outside each edge, so
        # critical points sitting on the window edge still show a sign change
        xs = np.concatenate([[window.lo - ISOLATION_TOL], self.x, [window.hi + ISOLATION_TOL]])
        self.d1 = ex.evaluate_array(c1.deriv, xs)
        self.d2 = ex.evaluate_array(c2.deriv, xs)

    def critical_cells(self, curve: int) -> np.ndarray:
        d = self.d1 if curve == 1 else self.d2
        changes = d[1:-2] * d[2:-1] <= 0
        changes[0] |= d[0] * d[1] <= 0
        changes[-1] |= d[-2] * d[-1] <= 0
        return np.nonzero(changes)[0]

    def runs(self, t: float, snap: float = 0.0) -> list[tuple[int, int]]:
        inside = (self.c1_lo <= t + snap) & (t - snap <= self.c2_hi)
        if not inside.any():
            return []
        padded = np.concatenate([[False], inside, [False]])
        diff = np.diff(padded.astype(np.int8))
        starts = np.nonzero(diff == 1)[0]
        stops = np.nonzero(diff == -1)[0] - 1
        return list(zip(starts.tolist(), stops.tolist()))

    def strictly_inside(self, t: float) -> bool:
        return bool(np.all(self.c1_hi < t) and np.all(t < self.c2_lo))

    def witness_cells(self, curve: int, t: float, run: tuple[int, int], tol: float) -> list[int]:
        d = self.d1 if curve == 1 else self.d2
        flo, fhi = (self.c1_lo, self.c1_hi) if curve == 1 else (self.c2_lo, self.c2_hi)
        out = []
        for c in range(run[0], run[1] + 1):
            # cell c spans samples c..c+1, i.e. ghost-padded indices c+1..c+2
            changes = d[c + 1] * d[c + 2] <= 0
            if c == 0:
                changes |= d[0] * d[1] <= 0
            if c == self.ncells - 1:
                changes |= d[c + 2] * d[c + 3] <= 0
            if changes and flo[c] - tol <= t <= fhi[c] + tol:
                out.append(c)
        return out

    def interval(self, run: tuple[int, int], tracks: int = 1) -> ComponentInterval:
        lo_edge = run[0] == 0
        hi_edge = run[1] == self.ncells - 1
        return ComponentInterval(
            self.x[run[0]],
            self.x[run[1] + 1],
            Carrier.WINDOW if lo_edge else Carrier.CURVE1,
            Carrier.WINDOW if hi_edge else Carrier.CURVE1,
            tracks,
        )


def _overlap(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] <= b[1] and b[0] <= a[1]


def _bijective(lower: list, upper: list) -> bool:
    if len(lower) != len(upper):
        return False
    for i, r in enumerate(lower):
        hits = [j for j, s in enumerate(upper) if _overlap(r, s)]
        if hits != [i]:
            return False
    return True


class _NeedsResolution(Exception):
    pass


def _track(grid: _Grid, t_from: float, t_to: float, runs_from: list, depth: int = 0) -> list:
    """Follow runs from level ``t_from`` to ``t_to`` inside one slab; return runs at ``t_to``."""
    runs_to = grid.runs(t_to)
    if _bijective(runs_from, runs_to):
        return runs_to
    if depth >= MAX_REFINE:
        raise _NeedsResolution(f"runs do not overlap between t={t_from!r} and t={t_to!r}")
    mid = 0.5 * (t_from + t_to)
    runs_mid = _track(grid, t_from, mid, runs_from, depth + 1)
    return _track(grid, mid, t_to, runs_mid, depth + 1)


def _link_to_event(
    grid: _Grid, t_mid: float, t_event: float, runs_mid: list, event_runs: list, snap: float
) -> list[int]:
    """For each midpoint run, the index of the event run its limit falls in.

    Walks from the midpoint toward the event by halving the distance until
    every tracked run overlaps exactly one event run. The walk stops at half
    the snap distance: event rows are snapped, so anything closer belongs to
    the event itself.
    """
    floor = 0.5 * snap
    runs = runs_mid
    t = t_mid
    for _ in range(MAX_REFINE):
        links = []
        for r in runs:
            hits = [j for j, e in enumerate(event_runs) if _overlap(r, e)]
            if len(hits) != 1:
                break
            links.append(hits[0])
        else:
            return links
        gap = 0.5 * (t - t_event)
        if abs(gap) < floor:
            if abs(t - t_event) <= floor:
                break
            gap = floor if gap > 0 else -floor
        t_next = t_event + gap
        runs_next = grid.runs(t_next)
        if len(runs_next) != len(runs_mid):
            raise _NeedsResolution(f"run count changes inside the slab near t={t_event!r}")
        runs = _track(grid, t, t_next, runs)
        t = t_next
    raise _NeedsResolution(f"slab runs never settle onto the event level t={t_event!r}")


@dataclass(frozen=True)
class GridQuotient:
    levels: tuple[float, ...]
    nx: int
    graph: ReebGraph


def oracle_reeb_graph(
    c1: FunctionSpec,
    c2: FunctionSpec,
    window=None,
    nx: int = 4096,
    event_levels_: Optional[Sequence[float]] = None,
    m: int = 3,
    level_tol: float = LEVEL_MERGE_TOL,
) -> ReebGraph:
    """Reeb graph from runs of raster cells; ``nx`` doubles on resolution trouble."""
    if nx < MIN_NX:
        raise ValueError(f"nx must be at least {MIN_NX}")
    window = c1.window if window is None else (window if isinstance(window, Interval) else Interval(*window))
    c1, c2 = c1.with_window(window), c2.with_window(window)
    if event_levels_ is None:
        event_levels_, _ = event_levels(c1, c2, window, level_tol)
    levels = sorted(float(t) for t in event_levels_)
    while True:
        try:
            return _oracle(c1, c2, window, nx, levels, m, level_tol).graph
        except _NeedsResolution as exc:
            if 2 * nx > MAX_NX:
                raise ReebConsistencyError(f"oracle did not resolve at nx={nx}: {exc}") from None
            warnings.warn(f"{exc}; doubling nx to {2 * nx}", ResolutionWarning, stacklevel=2)
            nx *= 2


def _check_gaps(runs: list, t: float):
    for a, b in zip(runs[:-1], runs[1:]):
        if b[0] - a[1] - 1 < MIN_GAP_CELLS:
            raise _NeedsResolution(f"two runs at t={t!r} are closer than {MIN_GAP_CELLS} cells")


def _check_separation(grid: _Grid, levels: list, tol: float):
    """A critical cell whose enclosure spans two event levels cannot tell them apart."""
    arr = np.asarray(levels)
    for curve in (1, 2):
        cells = grid.critical_cells(curve)
        flo, fhi = (grid.c1_lo, grid.c1_hi) if curve == 1 else (grid.c2_lo, grid.c2_hi)
        lo = np.searchsorted(arr, flo[cells] - tol, side="left")
        hi = np.searchsorted(arr, fhi[cells] + tol, side="right")
        bad = np.nonzero(hi - lo > 1)[0]
        if bad.size:
            c = cells[bad[0]]
            raise _NeedsResolution(f"enclosure of curve {curve} near x={float(grid.x[c])!r} spans two event levels")


def _oracle(c1, c2, window: Interval, nx: int, levels: list, m: int, level_tol: float) -> GridQuotient:
    grid = _Grid(c1, c2, window, nx)
    _check_separation(grid, levels, level_tol)

    def tracks_for(runs, t):
        if m == 2 and len(runs) == 1 and runs[0] == (0, grid.ncells - 1):
            if grid.strictly_inside(t) and whole_line_declared(c1, c2, t):
                return [2]
        return [1] * len(runs)

    ev_runs = [grid.runs(t, level_tol) for t in levels]
    ev_tracks = [tracks_for(r, t) for r, t in zip(ev_runs, levels)]
    for r, t in zip(ev_runs, levels):
        _check_gaps(r, t)

    # node key: (event index, run index, track)
    lower: dict = {}
    upper: dict = {}
    chains = []  # (lower node, upper node, midpoint level, interval)
    for k in range(len(levels) - 1):
        t_mid = 0.5 * (levels[k] + levels[k + 1])
        mid_runs = grid.runs(t_mid)
        _check_gaps(mid_runs, t_mid)
        mid_tracks = tracks_for(mid_runs, t_mid)
        down = _link_to_event(grid, t_mid, levels[k], mid_runs, ev_runs[k], level_tol)
        up = _link_to_event(grid, t_mid, levels[k + 1], mid_runs, ev_runs[k + 1], level_tol)
        for i, run in enumerate(mid_runs):
            for tr in range(mid_tracks[i]):
                lo_node = (k, down[i], tr if ev_tracks[k][down[i]] > 1 else 0)
                hi_node = (k + 1, up[i], tr if ev_tracks[k + 1][up[i]] > 1 else 0)
                cid = len(chains)
                chains.append((lo_node, hi_node, t_mid, grid.interval(run, mid_tracks[i])))
                upper.setdefault(lo_node, []).append(cid)
                lower.setdefault(hi_node, []).append(cid)

    vertices: list[ReebVertex] = []
    stops: dict = {}
    for k, runs in enumerate(ev_runs):
        t = levels[k]
        for i, run in enumerate(runs):
            for tr in range(ev_tracks[k][i]):
                node = (k, i, tr)
                nl, nu = len(lower.get(node, [])), len(upper.get(node, []))
                wit = []
                if tr == 0 and ev_tracks[k][i] == 1:
                    for curve in (1, 2):
                        for c in grid.witness_cells(curve, t, run, level_tol):
                            wit.append(Witness(curve, 0.5 * (grid.x[c] + grid.x[c + 1])))
                if wit:
                    vid = len(vertices)
                    vertices.append(ReebVertex(vid, t, _type(nl, nu), tuple(wit), grid.interval(run)))
                    stops[node] = End(EndKind.VERTEX, t, vertex=vid)
                elif nl == 1 and nu == 1:
                    continue
                elif (nl == 0) != (nu == 0) and (run[0] == 0 or run[1] == grid.ncells - 1):
                    side = Side.NEG if run[0] == 0 else Side.POS
                    x = grid.x[0] if side is Side.NEG else grid.x[-1]
                    stops[node] = End(EndKind.TRUNCATION, t, side=side, x=float(x))
                else:
                    raise _NeedsResolution(f"run at t={t!r} has {nl} lower and {nu} upper links but no witness")

    edges = []
    for node in sorted(stops):
        for cid in upper.get(node, []):
            crumbs = []
            while True:
                lo_node, hi_node, t_mid, comp = chains[cid]
                crumbs.append((t_mid, comp))
                if hi_node in stops:
                    break
                cid = upper[hi_node][0]
            edges.append(ReebEdge(len(edges), stops[node], stops[hi_node], tuple(crumbs)))
    t_range = Interval(levels[0], levels[-1]) if levels else None
    graph = ReebGraph(tuple(vertices), tuple(edges), window, m, tuple(levels), t_range, "oracle")
    return GridQuotient(tuple(levels), nx, graph)


def _type(lower: int, upper: int) -> VertexType:
    if lower == 0:
        return VertexType.MIN
    if upper == 0:
        return VertexType.MAX
    if lower == 1 and upper == 1:
        return VertexType.DEGREE2
    if lower >= 2 and upper == 1:
        return VertexType.MERGE
    if lower == 1 and upper >= 2:
        return VertexType.SPLIT
    return VertexType.SPLIT if upper >= lower else VertexType.MERGE


# -----------------------------------------------------------------------------
# comparison
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class ComparisonReport:
    equal: bool
    discrepancy: Optional[str] = None

    def __bool__(self) -> bool:
        return self.equal

    def to_dict(self) -> dict:
        return {"equal": self.equal, "discrepancy": self.discrepancy}


def compare_graphs(a: ReebGraph, b: ReebGraph, level_tol: float = 1e-4) -> ComparisonReport:
    """Compare graph invariants; vertex levels are matched per type within ``level_tol``."""
    ia, ib = graph_invariants(a), graph_invariants(b)
    for name in ("vertices_by_type", "e_compact", "e_total", "terminations", "b1", "components", "degrees"):
        va, vb = getattr(ia, name), getattr(ib, name)
        if va != vb:
            return ComparisonReport(False, f"{name}: {va} != {vb}")
    for vtype in sorted({v.type for v in a.vertices}, key=lambda v: v.value):
        la = sorted(v.level for v in a.vertices if v.type is vtype)
        lb = sorted(v.level for v in b.vertices if v.type is vtype)
        for x, y in zip(la, lb):
            if abs(x - y) > level_tol:
                return ComparisonReport(False, f"{vtype.value} vertex level {x!r} vs {y!r} exceeds {level_tol}")
    return ComparisonReport(True)
