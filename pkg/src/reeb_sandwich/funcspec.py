"""Boundary functions: critical-point isolation, ordering and tail declarations.

Behaviour at +-infinity cannot be decided from finite data, so every tail
fact is *declared* by the user. :func:`verify_declarations` only checks that
the declarations are consistent with what is visible near the window edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from . import expr as ex
from .errors import CertificationFailure, DeclarationContradiction, ExprDomainError, OrderViolation
from .expr import Expr, Interval

DEFAULT_WINDOW = (-10.0, 10.0)
ISOLATION_TOL = 1e-10
LEVEL_MERGE_TOL = 1e-8
ROOT_TOL = 1e-10


class Side(str, Enum):
    NEG = "-inf"
    POS = "+inf"

    @property
    def sign(self) -> int:
        return -1 if self is Side.NEG else 1


class Direction(str, Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"

    def flipped(self) -> "Direction":
        return Direction.DECREASING if self is Direction.INCREASING else Direction.INCREASING


class SignVsLimit(str, Enum):
    STRICTLY_ABOVE = "strictly_above"
    STRICTLY_BELOW = "strictly_below"
    TOUCHES_FROM_ABOVE = "touches_from_above"
    TOUCHES_FROM_BELOW = "touches_from_below"
    CROSSES = "crosses"

    def flipped(self) -> "SignVsLimit":
        return _SIGN_FLIP[self]

    @property
    def at_or_below(self) -> bool:
        return self in (SignVsLimit.STRICTLY_BELOW, SignVsLimit.TOUCHES_FROM_BELOW)

    @property
    def at_or_above(self) -> bool:
        return self in (SignVsLimit.STRICTLY_ABOVE, SignVsLimit.TOUCHES_FROM_ABOVE)


_SIGN_FLIP = {
    SignVsLimit.STRICTLY_ABOVE: SignVsLimit.STRICTLY_BELOW,
    SignVsLimit.STRICTLY_BELOW: SignVsLimit.STRICTLY_ABOVE,
    SignVsLimit.TOUCHES_FROM_ABOVE: SignVsLimit.TOUCHES_FROM_BELOW,
    SignVsLimit.TOUCHES_FROM_BELOW: SignVsLimit.TOUCHES_FROM_ABOVE,
    SignVsLimit.CROSSES: SignVsLimit.CROSSES,
}


class CriticalKind(str, Enum):
    LOCAL_MIN = "LocalMin"
    LOCAL_MAX = "LocalMax"
    INFLECTION = "Inflection-like"


@dataclass(frozen=True)
class TailDeclaration:
    """What the user asserts about one function on one side of the real line.

    ``limit`` is a finite float, ``math.inf``/``-math.inf`` for divergence, or
    None when undeclared. ``monotone_beyond`` is ``(T, direction)``: monotone
    on ``(-inf, T]`` for the negative side, on ``[T, inf)`` for the positive.
    """

    side: Side
    limit: Optional[float] = None
    monotone_beyond: Optional[tuple[float, Direction]] = None
    critical_set_unbounded: Optional[bool] = None
    sign_vs_limit: Optional[SignVsLimit] = None

    def __post_init__(self):
        object.__setattr__(self, "side", Side(self.side))
        if self.monotone_beyond is not None:
            t, d = self.monotone_beyond
            object.__setattr__(self, "monotone_beyond", (float(t), Direction(d)))
            if self.critical_set_unbounded:
                raise ValueError("a tail cannot be monotone and carry an unbounded critical set")
        if self.sign_vs_limit is not None:
            object.__setattr__(self, "sign_vs_limit", SignVsLimit(self.sign_vs_limit))
            if not self.has_finite_limit:
                raise ValueError("sign_vs_limit requires a finite limit")

    @property
    def has_finite_limit(self) -> bool:
        return self.limit is not None and math.isfinite(self.limit)

    @property
    def diverges(self) -> bool:
        return self.limit is not None and math.isinf(self.limit)

    @property
    def direction(self) -> Optional[Direction]:
        return None if self.monotone_beyond is None else self.monotone_beyond[1]

    def negated(self) -> "TailDeclaration":
        mono = None
        if self.monotone_beyond is not None:
            mono = (self.monotone_beyond[0], self.monotone_beyond[1].flipped())
        return TailDeclaration(
            side=self.side,
            limit=None if self.limit is None else -self.limit,
            monotone_beyond=mono,
            critical_set_unbounded=self.critical_set_unbounded,
            sign_vs_limit=None if self.sign_vs_limit is None else self.sign_vs_limit.flipped(),
        )

    def to_dict(self) -> dict:
        return {
            "side": self.side.value,
            "limit": _limit_to_json(self.limit),
            "monotone_beyond": None
            if self.monotone_beyond is None
            else {"threshold": self.monotone_beyond[0], "direction": self.monotone_beyond[1].value},
            "critical_set_unbounded": self.critical_set_unbounded,
            "sign_vs_limit": None if self.sign_vs_limit is None else self.sign_vs_limit.value,
        }

    @classmethod
    def from_dict(cls, side: Union[str, Side], data: dict) -> "TailDeclaration":
        mono = data.get("monotone_beyond")
        if mono is not None:
            mono = (float(mono["threshold"]), Direction(mono["direction"]))
        return cls(
            side=Side(side),
            limit=_limit_from_json(data.get("limit")),
            monotone_beyond=mono,
            critical_set_unbounded=data.get("critical_set_unbounded"),
            sign_vs_limit=data.get("sign_vs_limit"),
        )


def _limit_to_json(limit):
    if limit is None:
        return None
    if math.isinf(limit):
        return "+inf" if limit > 0 else "-inf"
    return limit


def _limit_from_json(value):
    if value is None:
        return None
    if isinstance(value, str):
        return {"+inf": math.inf, "inf": math.inf, "-inf": -math.inf}[value.strip()]
    return float(value)


@dataclass(frozen=True)
class CriticalPoint:
    x: float
    value: float
    bracket: Interval
    kind: CriticalKind

    def to_dict(self) -> dict:
        return {"x": self.x, "value": self.value, "bracket": self.bracket.as_list(), "kind": self.kind.value}


@dataclass(frozen=True)
class FunctionSpec:
    name: str
    expr: Expr
    deriv: Expr
    tails: tuple[TailDeclaration, TailDeclaration]
    critical_points: tuple[CriticalPoint, ...]
    window: Interval
    deriv2: Expr = field(repr=False, default=None)

    @classmethod
    def build(
        cls,
        name: str,
        source: Union[str, Expr],
        tails: Optional[Sequence[TailDeclaration]] = None,
        window: Union[Interval, tuple[float, float]] = DEFAULT_WINDOW,
        tol: float = ISOLATION_TOL,
    ) -> "FunctionSpec":
        e = ex.parse(source) if isinstance(source, str) else source
        window = window if isinstance(window, Interval) else Interval(*window)
        d1 = ex.differentiate(e)
        d2 = ex.differentiate(d1)
        if tails is None:
            tails = (TailDeclaration(Side.NEG), TailDeclaration(Side.POS))
        tails = tuple(sorted(tails, key=lambda t: t.side is Side.POS))
        points = isolate_critical_points(e, window, tol)
        return cls(name, e, d1, tails, tuple(points), window, d2)

    def with_window(self, window: Union[Interval, tuple[float, float], None], tol: float = ISOLATION_TOL) -> "FunctionSpec":
        """Same function with critical points isolated on another window."""
        if window is None:
            return self
        window = window if isinstance(window, Interval) else Interval(*window)
        if window == self.window:
            return self
        return replace(self, window=window, critical_points=tuple(isolate_critical_points(self.expr, window, tol)))

    def tail(self, side: Side) -> TailDeclaration:
        return self.tails[0] if Side(side) is Side.NEG else self.tails[1]

    def __call__(self, x: float) -> float:
        return ex.evaluate(self.expr, x)

    def values(self, xs) -> np.ndarray:
        return ex.evaluate_array(self.expr, xs)

    def slopes(self, xs) -> np.ndarray:
        return ex.evaluate_array(self.deriv, xs)

    def negated(self, name: Optional[str] = None) -> "FunctionSpec":
        """Spec of ``-f``; critical points keep their locations, kinds swap."""
        flip = {
            CriticalKind.LOCAL_MIN: CriticalKind.LOCAL_MAX,
            CriticalKind.LOCAL_MAX: CriticalKind.LOCAL_MIN,
            CriticalKind.INFLECTION: CriticalKind.INFLECTION,
        }
        points = tuple(replace(p, value=-p.value, kind=flip[p.kind]) for p in self.critical_points)
        return FunctionSpec(
            name or f"-{self.name}",
            ex.Neg(self.expr),
            ex.neg(self.deriv),
            tuple(t.negated() for t in self.tails),
            points,
            self.window,
            None if self.deriv2 is None else ex.neg(self.deriv2),
        )

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "expr": ex.to_source(self.expr),
            "derivative": ex.to_source(self.deriv),
            "tails": {t.side.value: t.to_dict() for t in self.tails},
            "critical_points": [p.to_dict() for p in self.critical_points],
        }


# -----------------------------------------------------------------------------
# critical point isolation
# -----------------------------------------------------------------------------

def _enclose(e: Expr, a: float, b: float) -> tuple[float, float, bool]:
    lo, hi, bad = ex.eval_interval_array(e, [a], [b])
    return lo[0], hi[0], bool(bad[0])


def _mean_value(e: Expr, a, b, lo, hi, dlo, dhi, dbad):
    """Intersect a natural enclosure of ``e`` with its mean-value form.

    ``e(I) within e(m) + e'(I) * [-r, r]``; the second form shrinks
    quadratically with the box and defeats cancellation in expanded sums.
    """
    m = 0.5 * (a + b)
    r = np.maximum(m - a, b - m)
    mlo, mhi, mbad = ex.eval_interval_array(e, m, m)
    slope = np.maximum(np.abs(dlo), np.abs(dhi))
    spread = np.nextafter(slope * r, np.inf)
    ok = ~dbad & ~mbad & np.isfinite(spread)
    with np.errstate(invalid="ignore"):
        mv_lo = np.nextafter(mlo - spread, -np.inf)
        mv_hi = np.nextafter(mhi + spread, np.inf)
    return np.where(ok, np.maximum(lo, mv_lo), lo), np.where(ok, np.minimum(hi, mv_hi), hi)


def _point_signs(e: Expr, xs: np.ndarray) -> np.ndarray:
    """Certified signs of ``e`` at points: +1, -1, or 0 when undecided."""
    lo, hi, bad = ex.eval_interval_array(e, xs, xs)
    return np.where(bad, 0, np.where(lo > 0.0, 1, np.where(hi < 0.0, -1, 0)))


def _bisect_sign(fn, a: float, b: float, sa: int, tol: float) -> tuple[float, float]:
    while b - a > tol:
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        vm = fn(m)
        if vm == 0.0:
            return m, m
        if (vm > 0) == (sa > 0):
            a = m
        else:
            b = m
    return a, b


def isolate_critical_points(
    f: Union[Expr, FunctionSpec],
    window: Union[Interval, tuple[float, float]] = DEFAULT_WINDOW,
    tol: float = ISOLATION_TOL,
    max_boxes: int = 200_000,
) -> list[CriticalPoint]:
    """Certified isolation of the zeros of ``f'`` on ``window``.

    Boxes on which interval arithmetic excludes a zero of ``f'`` are dropped.
    On boxes where ``f''`` has a certified sign, ``f'`` is monotone and has
    at most one zero, located by bisection. Where ``f''`` may vanish but
    ``f'''`` has a certified sign, the box is cut at the zero of ``f''`` so
    that touch zeros of ``f'`` (double roots) end up at a cut point.
    Zeros within ``tol`` outside the window are reported clamped to its edge.
    """
    e = f.expr if isinstance(f, FunctionSpec) else f
    window = window if isinstance(window, Interval) else Interval(*window)
    if tol <= 0:
        raise ValueError("tol must be positive")
    d1 = ex.differentiate(e)
    d2 = ex.differentiate(d1)
    d3 = ex.differentiate(d2)
    f1 = ex.compile_scalar(d1)
    f2 = ex.compile_scalar(d2)

    candidates: list[tuple[float, float]] = []

    def monotone(a: np.ndarray, b: np.ndarray):
        """Boxes on which ``f'`` is monotone: a sign change or a zero endpoint."""
        sa, sb = _point_signs(d1, a), _point_signs(d1, b)
        for i in np.nonzero((sa * sb < 0) | (sa == 0) | (sb == 0))[0]:
            if sa[i] * sb[i] < 0:
                candidates.append(_bisect_sign(f1, float(a[i]), float(b[i]), int(sa[i]), tol))
                continue
            if sa[i] == 0:
                candidates.append((float(a[i]), float(a[i])))
            if sb[i] == 0:
                candidates.append((float(b[i]), float(b[i])))

    def cut_at_inflection(a: np.ndarray, b: np.ndarray):
        """Boxes on which ``f''`` is monotone: split at its zero, if any."""
        sa, sb = _point_signs(d2, a), _point_signs(d2, b)
        cut = sa * sb < 0
        monotone(a[~cut], b[~cut])
        for i in np.nonzero(cut)[0]:
            za, zb = _bisect_sign(f2, float(a[i]), float(b[i]), int(sa[i]), 0.0)
            z = za if abs(f2(za)) <= abs(f2(zb)) else zb
            monotone(np.array([a[i], z]), np.array([z, b[i]]))

    # breadth-first over the whole frontier so each round is one vectorised
    # enclosure per derivative
    a = np.array([window.lo - tol])
    b = np.array([window.hi + tol])
    boxes = 0
    while a.size:
        boxes += a.size
        if boxes > max_boxes:
            raise CertificationFailure("critical point isolation exceeded its box budget", float(a[0]), float(b[-1]))
        lo1, hi1, bad1 = ex.eval_interval_array(d1, a, b)
        lo2, hi2, bad2 = ex.eval_interval_array(d2, a, b)
        lo3, hi3, bad3 = ex.eval_interval_array(d3, a, b)
        lo1, hi1 = _mean_value(d1, a, b, lo1, hi1, lo2, hi2, bad2)
        lo2, hi2 = _mean_value(d2, a, b, lo2, hi2, lo3, hi3, bad3)
        live = bad1 | ((lo1 <= 0.0) & (hi1 >= 0.0))
        flat = ~bad1 & (lo1 == 0.0) & (hi1 == 0.0)
        if flat.any():
            i = int(np.argmax(flat))
            raise CertificationFailure("derivative vanishes identically", float(a[i]), float(b[i]))
        a, b, bad1, bad2, bad3 = a[live], b[live], bad1[live], bad2[live], bad3[live]
        lo2, hi2, lo3, hi3 = lo2[live], hi2[live], lo3[live], hi3[live]
        mono = ~bad1 & ~bad2 & ((lo2 > 0.0) | (hi2 < 0.0))
        convex = ~bad1 & ~mono & ~bad2 & ~bad3 & ((lo3 > 0.0) | (hi3 < 0.0))
        monotone(a[mono], b[mono])
        cut_at_inflection(a[convex], b[convex])
        rest = ~(mono | convex)
        a, b, bad1 = a[rest], b[rest], bad1[rest]
        tiny = b - a <= tol
        if tiny.any():
            i = int(np.argmax(tiny))
            reason = "derivative undefined" if bad1[i] else "sign of the derivative could not be resolved"
            raise CertificationFailure(reason, float(a[i]), float(b[i]))
        m = 0.5 * (a + b)
        a, b = np.concatenate([a, m]), np.concatenate([m, b])
        order = np.argsort(a, kind="stable")
        a, b = a[order], b[order]

    return _finalize(e, d1, d2, candidates, window, tol)


def _finalize(e, d1, d2, candidates, window: Interval, tol: float) -> list[CriticalPoint]:
    candidates.sort()
    merged: list[list[float]] = []
    for a, b in candidates:
        if merged and a <= merged[-1][1] + tol:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    clamp = lambda v: min(max(v, window.lo), window.hi)  # noqa: E731
    fn = ex.compile_scalar(e)
    points = []
    for i, (a, b) in enumerate(merged):
        x = clamp(0.5 * (a + b))
        room = [math.inf]
        if i > 0:
            room.append(0.5 * (a - merged[i - 1][1]))
        if i + 1 < len(merged):
            room.append(0.5 * (merged[i + 1][0] - b))
        kind = _kind(d1, d2, x, a, b, min(room))
        points.append(CriticalPoint(x, fn(x), Interval(clamp(a), clamp(b)), kind))
    return points


def _kind(d1, d2, x, a, b, room) -> CriticalKind:
    for k in range(9, 3, -1):
        delta = 10.0**-k * (1.0 + abs(x))
        if delta >= room:
            break
        sl = ex.point_sign(d1, a - delta)
        sr = ex.point_sign(d1, b + delta)
        if sl and sr:
            if sl < 0 < sr:
                return CriticalKind.LOCAL_MIN
            if sl > 0 > sr:
                return CriticalKind.LOCAL_MAX
            return CriticalKind.INFLECTION
    s2 = ex.point_sign(d2, x)
    if s2 > 0:
        return CriticalKind.LOCAL_MIN
    if s2 < 0:
        return CriticalKind.LOCAL_MAX
    return CriticalKind.INFLECTION


# -----------------------------------------------------------------------------
# ordering
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class OrderCertificate:
    min_gap: float
    boxes: int
    window: Interval

    def to_dict(self) -> dict:
        return {"certified": True, "min_certified_gap": self.min_gap, "boxes": self.boxes}


def validate_pair(
    c1: FunctionSpec, c2: FunctionSpec, window: Union[Interval, tuple[float, float], None] = None
) -> OrderCertificate:
    """Certify ``c1 < c2`` on ``window`` by adaptive interval subdivision."""
    window = c1.window if window is None else window
    window = window if isinstance(window, Interval) else Interval(*window)
    gap = ex.sub(c2.expr, c1.expr)
    probe = np.linspace(window.lo, window.hi, 257)
    try:
        values = ex.evaluate_array(gap, probe)
    except ExprDomainError:
        values = np.array([_safe(gap, p) for p in probe])
    if np.any(~(values > 0)):
        i = int(np.argmax(~(values > 0)))
        raise OrderViolation(probe[i], probe[i], float(values[i]))
    edges = np.linspace(window.lo, window.hi, 65)
    lo, hi = edges[:-1], edges[1:]
    min_gap = math.inf
    boxes = 0
    min_width = 1e-9 * max(1.0, window.width)
    while lo.size:
        boxes += lo.size
        glo, _, _ = ex.eval_interval_array(gap, lo, hi)
        ok = glo > 0.0
        if np.any(ok):
            min_gap = min(min_gap, float(glo[ok].min()))
        lo, hi, glo = lo[~ok], hi[~ok], glo[~ok]
        if not lo.size:
            break
        narrow = (hi - lo) <= min_width
        if np.any(narrow):
            i = int(np.argmax(narrow))
            raise OrderViolation(float(lo[i]), float(hi[i]), float(glo[i]))
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
    return OrderCertificate(min_gap, boxes, window)


def _safe(e, x):
    try:
        return ex.evaluate(e, x)
    except ExprDomainError:
        return math.nan


# -----------------------------------------------------------------------------
# declarations
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckItem:
    side: Side
    check: str
    status: str  # "pass" | "warn" | "contradiction" | "skip"
    detail: str

    def to_dict(self) -> dict:
        return {"side": self.side.value, "check": self.check, "status": self.status, "detail": self.detail}


@dataclass(frozen=True)
class DeclarationReport:
    function: str
    items: tuple[CheckItem, ...]

    @property
    def contradictions(self) -> list[CheckItem]:
        return [i for i in self.items if i.status == "contradiction"]

    @property
    def ok(self) -> bool:
        return not self.contradictions

    def to_dict(self) -> dict:
        return {"function": self.function, "items": [i.to_dict() for i in self.items]}


def outer_strip(window: Interval, side: Side, fraction: float = 0.1) -> Interval:
    w = fraction * window.width
    if Side(side) is Side.NEG:
        return Interval(window.lo, window.lo + w)
    return Interval(window.hi - w, window.hi)


def _cells(strip: Interval, n: int):
    edges = np.linspace(strip.lo, strip.hi, n + 1)
    return edges[:-1], edges[1:]


def _certified_signs(e: Expr, strip: Interval, n: int = 128) -> np.ndarray:
    """Per-cell certified sign of ``e`` on ``strip`` (+1, -1 or 0)."""
    lo, hi = _cells(strip, n)
    rlo, rhi, bad = ex.eval_interval_array(e, lo, hi)
    return np.where(bad, 0, np.where(rlo > 0, 1, np.where(rhi < 0, -1, 0)))


def certified_tail_direction(f: FunctionSpec, side: Side, window: Optional[Interval] = None) -> Optional[Direction]:
    """Monotonicity certified on the outer strip of the window, if any."""
    signs = _certified_signs(f.deriv, outer_strip(window or f.window, side))
    if np.all(signs > 0):
        return Direction.INCREASING
    if np.all(signs < 0):
        return Direction.DECREASING
    return None


def tail_direction(f: FunctionSpec, side: Side) -> tuple[Optional[Direction], str]:
    """Eventual monotonicity on ``side``: declared first, window evidence second.

    Window evidence is only used when the critical set is declared bounded on
    that side (so the function is eventually monotone).
    """
    tail = f.tail(side)
    if tail.monotone_beyond is not None:
        return tail.direction, "declared"
    if tail.critical_set_unbounded is False:
        d = certified_tail_direction(f, side)
        if d is not None:
            return d, "window"
    return None, "unknown"


def tails_inside_level(c1: FunctionSpec, c2: FunctionSpec, t: float, side: Side, strict: bool, tol: float = LEVEL_MERGE_TOL) -> bool:
    """Whether, per declarations, ``c1 <= t <= c2`` holds far out on ``side``.

    With ``strict`` the inequalities must be strict (no touching of level t).
    """
    t1, t2 = c1.tail(side), c2.tail(side)
    if t1.limit is None or t2.limit is None:
        return False

    def below(tail: TailDeclaration) -> bool:
        if tail.limit == -math.inf:
            return True
        if tail.limit == math.inf:
            return False
        if tail.limit < t - tol:
            return True
        if abs(tail.limit - t) <= tol and tail.sign_vs_limit is not None:
            if strict:
                return tail.sign_vs_limit is SignVsLimit.STRICTLY_BELOW
            return tail.sign_vs_limit.at_or_below
        return False

    def above(tail: TailDeclaration) -> bool:
        if tail.limit == math.inf:
            return True
        if tail.limit == -math.inf:
            return False
        if tail.limit > t + tol:
            return True
        if abs(tail.limit - t) <= tol and tail.sign_vs_limit is not None:
            if strict:
                return tail.sign_vs_limit is SignVsLimit.STRICTLY_ABOVE
            return tail.sign_vs_limit.at_or_above
        return False

    return below(t1) and above(t2)


def verify_declarations(f: FunctionSpec, window: Optional[Interval] = None, samples: int = 128) -> DeclarationReport:
    """Check declared tail behaviour against the outer 10% of the window.

    Raises DeclarationContradiction when an interval-certified fact contradicts
    a declaration; softer disagreements are reported as warnings.
    """
    window = window or f.window
    samples = max(64, samples)
    items: list[CheckItem] = []
    for tail in f.tails:
        items += _check_tail(f, tail, window, samples)
    report = DeclarationReport(f.name, tuple(items))
    if report.contradictions:
        lines = "; ".join(f"{c.side.value} {c.check}: {c.detail}" for c in report.contradictions)
        raise DeclarationContradiction(f"{f.name}: {lines}")
    return report


def _check_tail(f: FunctionSpec, tail: TailDeclaration, window: Interval, n: int) -> list[CheckItem]:
    side = tail.side
    strip = outer_strip(window, side)
    xs = np.linspace(strip.lo, strip.hi, n)
    if side is Side.NEG:
        xs = xs[::-1]  # inner edge first, window edge last
    vals = f.values(xs)
    inner, outer = vals[: n // 2], vals[n // 2 :]
    dsign = _certified_signs(f.deriv, strip)
    out = []

    def item(check, status, detail):
        out.append(CheckItem(side, check, status, detail))

    # -- limit -------------------------------------------------------------
    if tail.limit is None:
        item("limit", "skip", "no limit declared")
    elif tail.has_finite_limit:
        q = tail.limit
        dist_in, dist_out = np.abs(inner - q).max(), np.abs(outer - q).max()
        fsign = _certified_signs(ex.sub(f.expr, ex.Const(q)), strip)
        away = None
        if np.all(fsign > 0):
            away = side.sign * dsign > 0
        elif np.all(fsign < 0):
            away = side.sign * dsign < 0
        if away is not None and np.all(away):
            item("limit", "contradiction", f"|f - {q}| is certified to grow toward the window edge")
        elif dist_out <= dist_in * (1 + 1e-9) + 1e-15:
            item("limit", "pass", f"|f - {q}| shrinks toward the edge ({dist_in:.3g} -> {dist_out:.3g})")
        else:
            item("limit", "warn", f"|f - {q}| does not shrink toward the edge ({dist_in:.3g} -> {dist_out:.3g})")
    else:
        # strip halves are too short against oscillation; compare with the whole window
        up = tail.limit > 0
        base = f.values(np.linspace(window.lo, window.hi, 4 * n)).mean()
        trend = vals.mean() > base if up else vals.mean() < base
        item("limit", "pass" if trend else "warn", f"mean value {base:.4g} on the window, {vals.mean():.4g} on the strip")

    # -- sign relative to the limit ----------------------------------------
    s = tail.sign_vs_limit
    if s is None:
        item("sign_vs_limit", "skip", "not declared")
    else:
        q = tail.limit
        fsign = _certified_signs(ex.sub(f.expr, ex.Const(q)), strip)
        touch = any(abs(p.value - q) <= LEVEL_MERGE_TOL for p in f.critical_points if p.x in strip) or bool(
            np.any(fsign == 0)
        )
        if s is SignVsLimit.STRICTLY_ABOVE or s is SignVsLimit.TOUCHES_FROM_ABOVE:
            wrong = np.any(fsign < 0)
        elif s is SignVsLimit.STRICTLY_BELOW or s is SignVsLimit.TOUCHES_FROM_BELOW:
            wrong = np.any(fsign > 0)
        else:
            wrong = False
        if wrong:
            item("sign_vs_limit", "contradiction", f"f - {q} has a certified sign opposite to {s.value}")
        elif s in (SignVsLimit.STRICTLY_ABOVE, SignVsLimit.STRICTLY_BELOW):
            status = "pass" if np.all(fsign != 0) else "warn"
            item("sign_vs_limit", status, "certified on every cell" if status == "pass" else "not certified on every cell")
        elif s is SignVsLimit.CROSSES:
            crosses = np.any(fsign > 0) and np.any(fsign < 0)
            item("sign_vs_limit", "pass" if crosses else "warn", "sign change seen" if crosses else "no certified sign change")
        else:
            item("sign_vs_limit", "pass" if touch else "warn", "touch seen" if touch else "no touch of the limit seen")

    # -- monotone tail -----------------------------------------------------
    if tail.monotone_beyond is None:
        item("monotone_beyond", "skip", "not declared")
    else:
        threshold, direction = tail.monotone_beyond
        beyond = strip.hi <= threshold if side is Side.NEG else strip.lo >= threshold
        want = 1 if direction is Direction.INCREASING else -1
        if np.any(dsign == -want):
            item("monotone_beyond", "contradiction", f"derivative certified against {direction.value}")
        elif not beyond:
            item("monotone_beyond", "warn", f"outer strip does not lie beyond T={threshold}")
        elif np.all(dsign == want):
            item("monotone_beyond", "pass", f"{direction.value} certified on the outer strip")
        else:
            item("monotone_beyond", "warn", "derivative sign not certified on every cell")

    # -- critical set ------------------------------------------------------
    inside = [p for p in f.critical_points if strip.lo <= p.x <= strip.hi]
    if tail.critical_set_unbounded is None:
        item("critical_set_unbounded", "skip", "not declared")
    elif tail.critical_set_unbounded:
        item("critical_set_unbounded", "pass" if inside else "warn", f"{len(inside)} critical points on the outer strip")
    else:
        item("critical_set_unbounded", "warn" if inside else "pass", f"{len(inside)} critical points on the outer strip")
    return out
