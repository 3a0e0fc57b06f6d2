"""Decide whether the Reeb space is a graph, a graph with ends, or not CW.

Every statement about behaviour at infinity comes from tail declarations,
combined with whatever the window can certify. Each clause records whether
it relied on declarations, so a verdict can be audited.

Side conventions for the four tail clauses (index k = 1..4):

=====  ========  =======  ==================  ========
k      function  side     "good" direction    partner
=====  ========  =======  ==================  ========
1      c2        -inf     increasing          c1
2      c2        +inf     decreasing          c1
3      c1        -inf     decreasing          c2
4      c1        +inf     increasing          c2
=====  ========  =======  ==================  ========

A "good" direction means the function moves away from the region as ``x``
heads outward, so every level set on that tail is cut off by a critical
point of the function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

import numpy as np

from .errors import MissingDeclaration
from .expr import Interval
from .funcspec import (
    LEVEL_MERGE_TOL,
    CriticalKind,
    Direction,
    FunctionSpec,
    Side,
    tail_direction,
    tails_inside_level,
)
from .reeb import End, EndKind, ReebGraph, level_components


class Kind(str, Enum):
    FINITE_GRAPH = "FiniteGraph"
    INFINITE_GRAPH = "InfiniteGraph"
    GRAPH_WITH_ENDS = "GraphWithEnds"
    NOT_CW = "NotCW"
    UNDETERMINED = "Undetermined"


class AsymptoticCase(str, Enum):
    BOTH_FINITE = "BothFinite"
    BOTH_DIVERGE = "BothDiverge"
    MIXED = "Mixed"
    UNSUPPORTED = "Unsupported"


@dataclass(frozen=True)
class Clause:
    id: str
    holds: Optional[bool]
    relies_on_declarations: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "holds": self.holds,
            "relies_on_declarations": self.relies_on_declarations,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class ClauseSet:
    applicable: bool
    clauses: tuple[Clause, ...] = ()

    def __getitem__(self, k: int) -> Clause:
        return self.clauses[k - 1]

    def values(self) -> tuple[Optional[bool], ...]:
        return tuple(c.holds for c in self.clauses)


_CLAUSES = {
    1: ("c2", Side.NEG, Direction.INCREASING),
    2: ("c2", Side.POS, Direction.DECREASING),
    3: ("c1", Side.NEG, Direction.DECREASING),
    4: ("c1", Side.POS, Direction.INCREASING),
}
_SIDE_CLAUSES = {Side.NEG: (1, 3), Side.POS: (2, 4)}


# -----------------------------------------------------------------------------
# almost-unimodal
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class AlmostUnimodalCertificate:
    holds: bool
    max_value: float
    plateau: Interval
    right_maxima: tuple[tuple[Interval, float], ...]
    left_maxima: tuple[tuple[Interval, float], ...]
    relies_on_declarations: bool
    witness: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "max_value": self.max_value,
            "plateau": self.plateau.as_list(),
            "right_maxima": [[iv.as_list(), v] for iv, v in self.right_maxima],
            "left_maxima": [[iv.as_list(), v] for iv, v in self.left_maxima],
            "relies_on_declarations": self.relies_on_declarations,
            "witness": self.witness,
        }


def _outward_maxima(xs: np.ndarray, vals: np.ndarray, minima: np.ndarray, start: int, step: int):
    """Interval maxima between consecutive local minima, walking from ``start`` by ``step``."""
    out = []
    i = start
    seg_start = start
    n = xs.size
    while 0 <= i + step < n:
        i += step
        if minima[i] or i in (0, n - 1):
            lo, hi = sorted((seg_start, i))
            out.append((Interval(float(xs[lo]), float(xs[hi])), float(vals[lo : hi + 1].max())))
            seg_start = i
    return out


def check_almost_unimodal(f: FunctionSpec, sign: int = 1, window=None, tol: float = LEVEL_MERGE_TOL) -> AlmostUnimodalCertificate:
    """Check that ``sign * f`` is almost-unimodal as far as window and declarations show.

    The window is partitioned at local minima of ``g = sign * f``; interval
    maxima must be non-increasing walking outward from the global maximum.
    Tails beyond the window are handled by declarations: a monotone tail
    heading away from the maximum extends the certificate; an oscillating
    tail is accepted when the window already shows at least three
    consecutive non-increasing maxima on that side.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    spec = f if sign == 1 else f.negated()
    if window is not None:
        spec = spec.with_window(window)
    window = spec.window
    xs = [window.lo] + [p.x for p in spec.critical_points if window.lo < p.x < window.hi] + [window.hi]
    xs = np.unique(np.asarray(xs, dtype=float))
    vals = spec.values(xs)
    kinds = {p.x: p.kind for p in spec.critical_points}
    minima = np.array([kinds.get(x) is CriticalKind.LOCAL_MIN for x in xs])

    top = float(vals.max())
    at_top = np.nonzero(vals >= top - tol)[0]
    centre = 0.5 * (window.lo + window.hi)
    k = int(at_top[np.argmin(np.abs(xs[at_top] - centre))])
    plateau = Interval(float(xs[k]), float(xs[k]))
    right = _outward_maxima(xs, vals, minima, k, +1)
    left = _outward_maxima(xs, vals, minima, k, -1)

    def fail(msg):
        return AlmostUnimodalCertificate(False, top, plateau, tuple(right), tuple(left), relies, msg)

    relies = False
    for side, maxima in ((Side.POS, right), (Side.NEG, left)):
        for (i1, m1), (i2, m2) in zip(maxima, maxima[1:]):
            if m2 > m1 + tol:
                return fail(f"interval maxima increase outward: {m1!r} on {i1.as_list()} then {m2!r} on {i2.as_list()}")
        tail = spec.tail(side)
        if tail.limit is not None and tail.limit > top + tol:
            return fail(f"tail limit {tail.limit!r} on the {side.value} side exceeds the window maximum {top!r}")
        # outward for g: decreasing on the right, increasing on the left
        outward_ok = Direction.DECREASING if side is Side.POS else Direction.INCREASING
        if tail.critical_set_unbounded:
            relies = True
            run = 1
            for (_, m1), (_, m2) in zip(maxima, maxima[1:]):
                run = run + 1 if m2 <= m1 + tol else 1
            if run < 3:
                return fail(f"oscillating {side.value} tail but fewer than 3 non-increasing maxima in the window")
            continue
        direction, source = tail_direction(spec, side)
        if direction is None:
            return fail(f"tail direction on the {side.value} side is not declared or certified")
        relies = True
        if direction is not outward_ok:
            return fail(f"{side.value} tail is {direction.value} ({source}), so maxima grow outward")
        edge = xs[-1] if side is Side.POS else xs[0]
        if float(spec(edge)) > top + tol:
            return fail("window edge exceeds the maximum")
    return AlmostUnimodalCertificate(True, top, plateau, tuple(right), tuple(left), relies)


# -----------------------------------------------------------------------------
# condition on limit levels
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class Condition223Report:
    q: float
    sides: tuple[Side, ...]
    components_in_window: int
    tails_in_level_set: tuple[Side, ...]
    accumulating: tuple[Side, ...]
    all_compact: bool
    neighborhoods_ok: bool
    failure_witness: Optional[str] = None

    @property
    def unbounded_component(self) -> bool:
        return bool(self.tails_in_level_set)

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "sides": [s.value for s in self.sides],
            "components_in_window": self.components_in_window,
            "tails_in_level_set": [s.value for s in self.tails_in_level_set],
            "accumulating": [s.value for s in self.accumulating],
            "unbounded_component": self.unbounded_component,
            "all_compact": self.all_compact,
            "neighborhoods_ok": self.neighborhoods_ok,
            "failure_witness": self.failure_witness,
        }


def _limit_sides(c1: FunctionSpec, c2: FunctionSpec, q: float, tol: float) -> list[Side]:
    out = []
    for side in (Side.NEG, Side.POS):
        l1, l2 = c1.tail(side).limit, c2.tail(side).limit
        if l1 is not None and l2 is not None and math.isfinite(l1) and math.isfinite(l2):
            if abs(l1 - q) <= tol and abs(l2 - q) <= tol:
                out.append(side)
    return out


def check_condition_223(
    c1: FunctionSpec, c2: FunctionSpec, q: float, window=None, tol: float = LEVEL_MERGE_TOL
) -> Condition223Report:
    """Do the components of S(q) at a limit level q have compact, critical-free neighbourhoods?

    A tail lies inside S(q) when, per declarations, c1 stays at or below q
    and c2 at or above q there; then S(q) has an unbounded component. If in
    addition critical points of either function accumulate on that tail,
    their critical values accumulate at q and no neighbourhood of that
    component avoids critical contours.
    """
    sides = _limit_sides(c1, c2, q, tol)
    if not sides:
        raise MissingDeclaration(f"no side has both limits declared equal to q={q!r}")
    missing = [
        f"{name}.{side.value}.sign_vs_limit"
        for side in sides
        for name, f in (("c1", c1), ("c2", c2))
        if f.tail(side).sign_vs_limit is None
    ]
    if missing:
        raise MissingDeclaration("condition at a limit level needs " + ", ".join(missing))
    comps = level_components(c1, c2, q, window)
    inside = tuple(s for s in sides if tails_inside_level(c1, c2, q, s, strict=False, tol=tol))
    accumulating = tuple(
        s for s in sides if c1.tail(s).critical_set_unbounded or c2.tail(s).critical_set_unbounded
    )
    bad = [s for s in inside if s in accumulating]
    witness = None
    if bad:
        whole = (
            len(comps) == 1
            and comps.components[0].lo == (window or c1.window).lo
            and comps.components[0].hi == (window or c1.window).hi
            and len(inside) == 2
        )
        shape = "S(q) is the whole line" if whole else f"S(q) contains the {bad[0].value} tail"
        witness = (
            f"{shape}: a connected, non-compact component at q={q!r} on which critical values "
            f"accumulate ({', '.join(s.value for s in bad)} side); it meets infinitely many cells"
        )
    return Condition223Report(
        q=q,
        sides=tuple(sides),
        components_in_window=len(comps),
        tails_in_level_set=inside,
        accumulating=accumulating,
        all_compact=not inside,
        neighborhoods_ok=not bad,
        failure_witness=witness,
    )


# -----------------------------------------------------------------------------
# tail clauses
# -----------------------------------------------------------------------------

def _bounded(f: FunctionSpec, side: Side) -> Optional[bool]:
    tail = f.tail(side)
    if tail.critical_set_unbounded is not None:
        return not tail.critical_set_unbounded
    if tail.monotone_beyond is not None:
        return True
    return None


def _heads(f: FunctionSpec, side: Side, want: Direction) -> tuple[Optional[bool], str]:
    direction, source = tail_direction(f, side)
    if direction is None:
        return None, source
    return direction is want, source


class _Facts:
    """Per-clause facts with the names of missing declarations."""

    def __init__(self, c1: FunctionSpec, c2: FunctionSpec, k: int):
        own_name, side, want = _CLAUSES[k]
        own, partner = (c2, c1) if own_name == "c2" else (c1, c2)
        partner_name = "c1" if own_name == "c2" else "c2"
        self.k, self.side, self.want = k, side, want
        self.own_name, self.partner_name = own_name, partner_name
        self.own_bounded = _bounded(own, side)
        self.partner_bounded = _bounded(partner, side)
        self.heads, self.source = (None, "unknown")
        if self.own_bounded:
            self.heads, self.source = _heads(own, side, want)

    def need(self, *what: str):
        missing = []
        if "own" in what and self.own_bounded is None:
            missing.append(f"{self.own_name}.{self.side.value}.critical_set_unbounded")
        if "heads" in what and self.own_bounded and self.heads is None:
            missing.append(f"{self.own_name}.{self.side.value}.monotone_beyond")
        if "partner" in what and self.partner_bounded is None:
            missing.append(f"{self.partner_name}.{self.side.value}.critical_set_unbounded")
        if missing:
            raise MissingDeclaration(", ".join(missing))

    @property
    def side_word(self) -> str:
        return "left" if self.side is Side.NEG else "right"


def _prop2_clause(c1, c2, k: int) -> Clause:
    f = _Facts(c1, c2, k)
    cid = f"Prop2(2.{k})"
    if f.own_bounded is False:
        return Clause(cid, True, True, f"critical set of {f.own_name} is unbounded on the {f.side_word}")
    f.need("own", "heads")
    word = f"{f.own_name} is {'' if f.heads else 'not '}eventually {f.want.value} on the {f.side_word} ({f.source})"
    return Clause(cid, bool(f.heads), True, word)


def _prop3_clause(c1, c2, k: int) -> Clause:
    f = _Facts(c1, c2, k)
    cid = f"Prop3(3.{k})"
    if f.own_bounded is False:
        return Clause(cid, False, True, f"critical set of {f.own_name} is unbounded on the {f.side_word}")
    f.need("own", "heads")
    if f.heads:
        return Clause(cid, False, True, f"{f.own_name} is eventually {f.want.value} on the {f.side_word} ({f.source})")
    f.need("partner")
    if not f.partner_bounded:
        return Clause(cid, False, True, f"critical set of {f.partner_name} is unbounded on the {f.side_word}")
    return Clause(
        cid,
        True,
        True,
        f"critical sets of c1 and c2 are bounded on the {f.side_word} and {f.own_name} is not eventually "
        f"{f.want.value} there ({f.source})",
    )


def _thm3_condition(c1, c2, k: int) -> Clause:
    """Either (2.k) or: own critical set bounded, own not heading away, partner critical set unbounded."""
    f = _Facts(c1, c2, k)
    cid = f"Thm3({k})"
    if f.own_bounded is False:
        return Clause(cid, True, True, f"via (2.{k}): critical set of {f.own_name} is unbounded on the {f.side_word}")
    f.need("own", "heads")
    if f.heads:
        return Clause(cid, True, True, f"via (2.{k}): {f.own_name} is eventually {f.want.value} ({f.source})")
    f.need("partner")
    if not f.partner_bounded:
        return Clause(
            cid, True, True,
            f"via (3.{k})-variant: critical set of {f.partner_name} is unbounded on the {f.side_word}",
        )
    return Clause(cid, False, True, f"(3.{k}) holds: the {f.side_word} tail of the region has no critical points")


def asymptotic_case(c1: FunctionSpec, c2: FunctionSpec, tol: float = LEVEL_MERGE_TOL) -> tuple[AsymptoticCase, list[str]]:
    kinds = []
    problems = []
    for side in (Side.NEG, Side.POS):
        l1, l2 = c1.tail(side).limit, c2.tail(side).limit
        if l1 is None or l2 is None:
            problems += [f"{n}.{side.value}.limit" for n, l in (("c1", l1), ("c2", l2)) if l is None]
            kinds.append(None)
        elif math.isfinite(l1) and math.isfinite(l2):
            if abs(l1 - l2) > tol:
                problems.append(f"limits differ on the {side.value} side ({l1!r} vs {l2!r})")
                kinds.append(None)
            else:
                kinds.append("finite")
        elif math.isinf(l1) and math.isinf(l2):
            if l1 != l2:
                problems.append(f"c1 and c2 diverge in opposite directions on the {side.value} side")
                kinds.append(None)
            else:
                kinds.append("diverge")
        else:
            problems.append(f"one function converges and the other diverges on the {side.value} side")
            kinds.append(None)
    if None in kinds:
        return AsymptoticCase.UNSUPPORTED, problems
    if kinds == ["finite", "finite"]:
        return AsymptoticCase.BOTH_FINITE, []
    if kinds == ["diverge", "diverge"]:
        return AsymptoticCase.BOTH_DIVERGE, []
    return AsymptoticCase.MIXED, []


def eval_prop2_clauses(c1: FunctionSpec, c2: FunctionSpec) -> ClauseSet:
    if asymptotic_case(c1, c2)[0] is not AsymptoticCase.BOTH_FINITE:
        return ClauseSet(False)
    return ClauseSet(True, tuple(_prop2_clause(c1, c2, k) for k in range(1, 5)))


def eval_prop3_clauses(c1: FunctionSpec, c2: FunctionSpec) -> ClauseSet:
    if asymptotic_case(c1, c2)[0] is not AsymptoticCase.BOTH_FINITE:
        return ClauseSet(False)
    return ClauseSet(True, tuple(_prop3_clause(c1, c2, k) for k in range(1, 5)))


def eval_thm3_conditions(c1: FunctionSpec, c2: FunctionSpec, ks=(1, 2, 3, 4)) -> tuple[Clause, ...]:
    return tuple(_thm3_condition(c1, c2, k) for k in ks)


# -----------------------------------------------------------------------------
# verdict
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    kind: Kind
    is_reeb_graph: bool
    is_graph: Optional[bool]
    asymptotic_case: AsymptoticCase
    fired_clauses: tuple[Clause, ...]
    basis: tuple[str, ...] = ()
    missing: tuple[str, ...] = ()
    flags: tuple[str, ...] = ()
    condition_223: tuple[Condition223Report, ...] = ()
    almost_unimodal: tuple[tuple[str, AlmostUnimodalCertificate], ...] = ()
    graph: Optional[ReebGraph] = field(default=None, repr=False)

    def clause(self, cid: str) -> Optional[Clause]:
        return next((c for c in self.fired_clauses if c.id == cid), None)

    def to_dict(self) -> dict:
        return {
            "verdict": self.kind.value,
            "is_reeb_graph": self.is_reeb_graph,
            "is_graph": self.is_graph,
            "asymptotic_case": self.asymptotic_case.value,
            "basis": list(self.basis),
            "fired_clauses": [c.to_dict() for c in self.fired_clauses],
            "missing": list(self.missing),
            "flags": list(self.flags),
            "condition_223": [r.to_dict() for r in self.condition_223],
            "almost_unimodal": {name: cert.to_dict() for name, cert in self.almost_unimodal},
        }


def _has_critical_point(c1: FunctionSpec, c2: FunctionSpec) -> bool:
    if c1.critical_points or c2.critical_points:
        return True
    return any(f.tail(s).critical_set_unbounded for f in (c1, c2) for s in (Side.NEG, Side.POS))


def _any_unbounded(c1, c2, sides=(Side.NEG, Side.POS)) -> bool:
    return any(f.tail(s).critical_set_unbounded for f in (c1, c2) for s in sides)


def _ends_inside_window(f: FunctionSpec, side: Side, window: Interval) -> bool:
    """Whether, per declarations, all critical points of ``f`` on ``side`` lie in the window."""
    tail = f.tail(side)
    if tail.critical_set_unbounded:
        return False
    if tail.monotone_beyond is not None:
        t = tail.monotone_beyond[0]
        return t >= window.lo if side is Side.NEG else t <= window.hi
    return tail.critical_set_unbounded is False and tail_direction(f, side)[0] is not None


def reclassify_ends(g: ReebGraph, c1: FunctionSpec, c2: FunctionSpec, sides) -> tuple[ReebGraph, list[str]]:
    """Turn window truncations on ``sides`` into declared ends where declarations allow it."""
    notes = []
    ok_sides = set()
    for side in sides:
        if _ends_inside_window(c1, side, g.window) and _ends_inside_window(c2, side, g.window):
            ok_sides.add(side)
        else:
            notes.append(f"truncations on the {side.value} side kept: critical points may lie beyond the window")

    def fix(end: End) -> End:
        if end.kind is EndKind.TRUNCATION and end.side in ok_sides:
            return replace(end, kind=EndKind.DECLARED)
        return end

    edges = [replace(e, lower=fix(e.lower), upper=fix(e.upper)) for e in g.edges]
    return g.with_edges(edges), notes


def classify(c1: FunctionSpec, c2: FunctionSpec, g: Optional[ReebGraph] = None, window=None) -> Verdict:
    """Dispatch on the asymptotic case and evaluate the matching theorem."""
    if window is not None:
        c1, c2 = c1.with_window(window), c2.with_window(window)
    case, problems = asymptotic_case(c1, c2)
    clauses: list[Clause] = []

    def undetermined(missing, flags=(), reports=(), aus=()):
        return Verdict(Kind.UNDETERMINED, False, None, case, tuple(clauses), (), tuple(missing), tuple(flags), tuple(reports), tuple(aus), g)

    if case is AsymptoticCase.UNSUPPORTED:
        return undetermined(problems, ["tail limits fall outside the three supported asymptotic regimes"])

    has_cp = _has_critical_point(c1, c2)
    clauses.append(Clause("Thm2(2):critical-point-exists", has_cp, not (c1.critical_points or c2.critical_points)))
    if not has_cp:
        return undetermined([], ["neither function has a critical point"])
    clauses.append(
        Clause(
            "Thm2(2):discrete-critical-values",
            True,
            _any_unbounded(c1, c2),
            "critical values accumulate only at declared limit levels",
        )
    )

    # limit-level condition on every finite side
    reports = []
    finite_q = sorted({c1.tail(s).limit for s in (Side.NEG, Side.POS) if c1.tail(s).has_finite_limit})
    try:
        for q in finite_q:
            rep = check_condition_223(c1, c2, q, c1.window)
            reports.append(rep)
            clauses.append(Clause(f"(2.2.3)@q={q!r}", rep.neighborhoods_ok, True, rep.failure_witness or "compact neighbourhoods exist"))
    except MissingDeclaration as exc:
        return undetermined([str(exc)], reports=reports)
    failed = [r for r in reports if not r.neighborhoods_ok]
    if failed:
        return Verdict(
            Kind.NOT_CW, False, None, case, tuple(clauses), tuple(f"(2.2.3)@q={r.q!r}" for r in failed),
            (), (), tuple(reports), (), g,
        )
    noncompact = [r for r in reports if not r.all_compact]
    if noncompact:
        sides = ", ".join(s.value for r in noncompact for s in r.tails_in_level_set)
        return undetermined(
            [], [f"S(q) has a non-compact component without accumulating critical values ({sides}); "
                 "the limit-level hypothesis fails but the space is not shown to be non-CW"], reports,
        )

    try:
        if case is AsymptoticCase.BOTH_FINITE:
            return _both_finite(c1, c2, g, clauses, reports)
        if case is AsymptoticCase.BOTH_DIVERGE:
            return _both_diverge(c1, c2, g, clauses)
        return _mixed(c1, c2, g, clauses, reports)
    except MissingDeclaration as exc:
        return undetermined([str(exc)], reports=reports)


def _graph_kind(c1, c2) -> Kind:
    return Kind.INFINITE_GRAPH if _any_unbounded(c1, c2) else Kind.FINITE_GRAPH


def _prop1(c1, c2, clauses, flags) -> tuple[Optional[bool], list]:
    aus = []
    holds = []
    for k, (name, f, sign) in enumerate((("c1", c1, -1), ("c2", c2, 1)), start=1):
        unbounded = f.tail(Side.NEG).critical_set_unbounded or f.tail(Side.POS).critical_set_unbounded
        label = f"-{name}" if sign < 0 else name
        if unbounded:
            clauses.append(Clause(f"Prop1(1.{k})", True, True, f"critical set of {name} is unbounded"))
            holds.append(True)
            continue
        cert = check_almost_unimodal(f, sign)
        aus.append((label, cert))
        detail = f"{label} is almost-unimodal" if cert.holds else f"{label} not shown almost-unimodal: {cert.witness}"
        clauses.append(Clause(f"Prop1(1.{k})", cert.holds, cert.relies_on_declarations, detail))
        holds.append(cert.holds)
    return all(holds), aus


def _both_finite(c1, c2, g, clauses, reports) -> Verdict:
    p2 = eval_prop2_clauses(c1, c2)
    p3 = eval_prop3_clauses(c1, c2)
    t3 = eval_thm3_conditions(c1, c2)
    clauses += list(p2.clauses) + list(p3.clauses) + list(t3)
    flags = []
    p1, aus = _prop1(c1, c2, clauses, flags)
    is_graph = all(c.holds for c in t3)
    if p1 and not is_graph:
        flags.append("Prop1 clauses hold but a Thm3 condition fails; Thm3 preferred")
    if all(p2.values()) and not is_graph:
        flags.append("all Prop2 clauses hold but a Thm3 condition fails")
    if is_graph:
        basis = ["Prop1(1.1)", "Prop1(1.2)"] if p1 else [c.id for c in t3]
        return Verdict(_graph_kind(c1, c2), True, True, AsymptoticCase.BOTH_FINITE, tuple(clauses), tuple(basis),
                       (), tuple(flags), tuple(reports), tuple(aus), g)
    fired = [c.id for c in p3.clauses if c.holds]
    sides = [s for s in (Side.NEG, Side.POS) if any(p3[k].holds for k in _SIDE_CLAUSES[s])]
    graph = g
    if g is not None:
        graph, notes = reclassify_ends(g, c1, c2, sides)
        flags += notes
    return Verdict(Kind.GRAPH_WITH_ENDS, True, False, AsymptoticCase.BOTH_FINITE, tuple(clauses), tuple(fired),
                   (), tuple(flags), tuple(reports), tuple(aus), graph)


def _s_unbounded(c1, c2, side: Side) -> Clause:
    vals = [f.tail(side).critical_set_unbounded for f in (c1, c2)]
    if any(vals):
        return Clause(f"S(c1)uS(c2) unbounded {'below' if side is Side.NEG else 'above'}", True, True,
                      "a critical set is declared unbounded")
    missing = [f"{n}.{side.value}.critical_set_unbounded" for n, f, v in (("c1", c1, vals[0]), ("c2", c2, vals[1]))
               if v is None and f.tail(side).monotone_beyond is None]
    if missing:
        raise MissingDeclaration(", ".join(missing))
    return Clause(f"S(c1)uS(c2) unbounded {'below' if side is Side.NEG else 'above'}", False, True,
                  "both critical sets are bounded")


def _both_diverge(c1, c2, g, clauses) -> Verdict:
    per_side = {s: _s_unbounded(c1, c2, s) for s in (Side.NEG, Side.POS)}
    unbounded = any(c.holds for c in per_side.values())
    clauses.append(Clause("Thm4", unbounded, True, "graph iff S(c1)uS(c2) is unbounded"))
    clauses += list(per_side.values())
    if unbounded:
        return Verdict(_graph_kind(c1, c2), True, True, AsymptoticCase.BOTH_DIVERGE, tuple(clauses), ("Thm4",),
                       graph=g)
    flags = []
    graph = g
    if g is not None:
        graph, flags = reclassify_ends(g, c1, c2, [Side.NEG, Side.POS])
    return Verdict(Kind.GRAPH_WITH_ENDS, True, False, AsymptoticCase.BOTH_DIVERGE, tuple(clauses), ("Thm4",),
                   (), tuple(flags), graph=graph)


def _mixed(c1, c2, g, clauses, reports) -> Verdict:
    finite = Side.NEG if c1.tail(Side.NEG).has_finite_limit else Side.POS
    diverging = Side.POS if finite is Side.NEG else Side.NEG
    t3 = eval_thm3_conditions(c1, c2, _SIDE_CLAUSES[finite])
    c54 = all(c.holds for c in t3)
    c55 = _s_unbounded(c1, c2, diverging)
    clauses += list(t3)
    clauses.append(Clause("Thm5(5.4)", c54, True, f"Thm3 conditions {_SIDE_CLAUSES[finite]} at the finite side"))
    clauses.append(Clause("Thm5(5.5)", c55.holds, True, c55.id))
    if c54 and c55.holds:
        return Verdict(_graph_kind(c1, c2), True, True, AsymptoticCase.MIXED, tuple(clauses),
                       ("Thm5(5.4)", "Thm5(5.5)"), condition_223=tuple(reports), graph=g)
    sides = ([finite] if not c54 else []) + ([diverging] if not c55.holds else [])
    flags = []
    graph = g
    if g is not None:
        graph, flags = reclassify_ends(g, c1, c2, sides)
    basis = tuple(x for x, ok in (("Thm5(5.4)", c54), ("Thm5(5.5)", c55.holds)) if not ok)
    return Verdict(Kind.GRAPH_WITH_ENDS, True, False, AsymptoticCase.MIXED, tuple(clauses), basis, (),
                   tuple(flags), tuple(reports), graph=graph)
