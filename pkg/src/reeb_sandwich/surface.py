"""The hypersurface X = {(x1, x2, y) : (x1 - c1(x2))(c2(x2) - x1) = |y|^2}.

Coordinates follow the construction: ``x1`` is the height, ``x2`` the base
coordinate (the ``x`` of the planar problem) and ``y`` has ``m - 1`` entries.
Everything here is sampled, not certified; it is a smoke test of the
plumbing that feeds the planar sweep.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import optimize
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import SamplingFailure
from .expr import Interval
from .funcspec import ROOT_TOL, FunctionSpec

MANIFOLD_THRESHOLD = 1e-6


def _window(c1: FunctionSpec, window) -> Interval:
    if window is None:
        return c1.window
    return window if isinstance(window, Interval) else Interval(*window)


def defining_value(c1: FunctionSpec, c2: FunctionSpec, x1: float, x2: float, y: Sequence[float] = ()) -> float:
    """``(x1 - c1(x2))(c2(x2) - x1) - sum(y_j^2)``."""
    y = np.asarray(y, dtype=float)
    return (x1 - c1(x2)) * (c2(x2) - x1) - float(np.dot(y, y))


def gradient(c1: FunctionSpec, c2: FunctionSpec, x1, x2, y) -> np.ndarray:
    """Gradient of the defining function, vectorised over rows.

    ``x1``, ``x2`` have shape ``(n,)`` and ``y`` shape ``(n, m - 1)``.
    Returns an ``(n, m + 1)`` array ordered as ``(d/dx1, d/dx2, d/dy...)``.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    y = np.atleast_2d(np.asarray(y, dtype=float))
    a, b = c1.values(x2), c2.values(x2)
    da, db = c1.slopes(x2), c2.slopes(x2)
    gx1 = a + b - 2.0 * x1
    gx2 = -da * (b - x1) + (x1 - a) * db
    return np.column_stack([gx1, gx2, -2.0 * y])


@dataclass(frozen=True)
class ManifoldReport:
    m: int
    samples: int
    min_norm: float
    argmin: tuple[float, ...]
    max_residual: float

    @property
    def passed(self) -> bool:
        return self.min_norm > MANIFOLD_THRESHOLD

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "samples": self.samples,
            "min_gradient_norm": self.min_norm,
            "argmin": list(self.argmin),
            "max_residual": self.max_residual,
            "status": "PASS" if self.passed else "FAIL",
        }


def _sphere(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    if dim == 1:
        return rng.choice([-1.0, 1.0], size=(n, 1))
    v = rng.standard_normal((n, dim))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sample_zero_set(
    c1: FunctionSpec, c2: FunctionSpec, m: int, samples: int, window=None, seed: int = 0
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Random points of X: half interior (y on the sphere of radius sqrt(g)), half on the boundary curves."""
    if m < 2:
        raise ValueError("m must be at least 2")
    if samples < 1:
        raise ValueError("samples must be positive")
    window = _window(c1, window)
    rng = np.random.default_rng(seed)
    n_int = (samples + 1) // 2
    n_bdy = samples - n_int

    s = rng.uniform(window.lo, window.hi, n_int)
    a, b = c1.values(s), c2.values(s)
    if not np.any(b > a):
        raise SamplingFailure("the region between c1 and c2 has empty interior on the window")
    keep = b > a
    s, a, b = s[keep], a[keep], b[keep]
    u = rng.uniform(0.0, 1.0, s.size)
    x1 = a + u * (b - a)
    g = (x1 - a) * (b - x1)
    y = _sphere(rng, s.size, m - 1) * np.sqrt(np.maximum(g, 0.0))[:, None]

    t = rng.uniform(window.lo, window.hi, n_bdy)
    which = np.arange(n_bdy) % 2
    bx1 = np.where(which == 0, c1.values(t), c2.values(t))
    by = np.zeros((n_bdy, m - 1))
    return np.concatenate([x1, bx1]), np.concatenate([s, t]), np.vstack([y, by])


def verify_manifold(
    c1: FunctionSpec, c2: FunctionSpec, m: int = 3, samples: int = 10_000, window=None, seed: int = 0
) -> ManifoldReport:
    """Minimum gradient norm of the defining function over sampled points of X."""
    x1, x2, y = sample_zero_set(c1, c2, m, samples, window, seed)
    grad = gradient(c1, c2, x1, x2, y)
    norms = np.linalg.norm(grad, axis=1)
    i = int(np.argmin(norms))
    a, b = c1.values(x2), c2.values(x2)
    residual = np.abs((x1 - a) * (b - x1) - np.sum(y * y, axis=1))
    point = (float(x1[i]), float(x2[i]), *map(float, y[i]))
    return ManifoldReport(m, x1.size, float(norms[i]), point, float(residual.max()))


# -----------------------------------------------------------------------------
# critical point correspondence
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class SurfaceCriticalPoint:
    curve: int
    s: float
    height: float

    def coords(self, m: int) -> tuple[float, ...]:
        return (self.height, self.s) + (0.0,) * (m - 1)


@dataclass(frozen=True)
class CorrespondenceReport:
    m: int
    tol: float
    predicted: tuple[SurfaceCriticalPoint, ...]
    detected: tuple[SurfaceCriticalPoint, ...]
    unmatched_predicted: tuple[SurfaceCriticalPoint, ...] = field(default=())
    unmatched_detected: tuple[SurfaceCriticalPoint, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return not self.unmatched_predicted and not self.unmatched_detected

    def to_dict(self) -> dict:
        fmt = lambda pts: [{"curve": p.curve, "point": list(p.coords(self.m))} for p in pts]  # noqa: E731
        return {
            "status": "MATCH" if self.ok else "MISMATCH",
            "tol": self.tol,
            "predicted": fmt(self.predicted),
            "detected": fmt(self.detected),
            "unmatched_predicted": fmt(self.unmatched_predicted),
            "unmatched_detected": fmt(self.unmatched_detected),
        }


def _boundary_x2_derivative(c1: FunctionSpec, c2: FunctionSpec, curve: int):
    """``dG/dx2`` restricted to boundary curve ``curve`` as a vectorised function of s."""
    own = c1 if curve == 1 else c2

    def h(s):
        s = np.asarray(s, dtype=float)
        gap = c2.values(s) - c1.values(s)
        return -own.slopes(s) * gap if curve == 1 else own.slopes(s) * gap

    return h


def _detect_zeros(h, lo: float, hi: float, tol: float, n: int) -> list[float]:
    xs = np.linspace(lo - ROOT_TOL, hi + ROOT_TOL, n)
    v = h(xs)
    roots = [float(x) for x, val in zip(xs, v) if val == 0.0]
    sign_change = np.nonzero(v[:-1] * v[1:] < 0)[0]
    for i in sign_change:
        roots.append(optimize.brentq(lambda s: float(h(s)), xs[i], xs[i + 1], xtol=1e-15, rtol=1e-15))
    # touch zeros: local minima of |h| without sign change
    av = np.abs(v)
    scale = max(float(av.max()), 1e-300)
    dips = (av[1:-1] < av[:-2]) & (av[1:-1] <= av[2:]) & (v[:-2] * v[2:] > 0) & (v[1:-1] != 0)
    dips &= av[1:-1] <= 1e-3 * scale  # a touch zero sits far below the typical size
    for i in np.nonzero(dips)[0] + 1:
        res = optimize.minimize_scalar(
            lambda s: abs(float(h(s))), bounds=(xs[i - 1], xs[i + 1]), method="bounded",
            options={"xatol": 1e-12},
        )
        if abs(res.fun) <= 1e-12 * scale:
            roots.append(float(res.x))
    roots = sorted(min(max(r, lo), hi) for r in roots)
    merged: list[float] = []
    for r in roots:
        if not merged or r - merged[-1] > tol:
            merged.append(r)
    return merged


def critical_correspondence(
    c1: FunctionSpec, c2: FunctionSpec, m: int = 3, window=None, tol: float = 1e-8, scan: int = 20_001
) -> CorrespondenceReport:
    """Compare predicted critical points of the height on X with detected ones.

    Predicted: ``(c_i(s), s, 0)`` for critical points ``s`` of ``c_i``.
    Detected: zeros of ``dG/dx2`` along each boundary curve, where the
    gradient of the defining function is parallel to the height axis.
    """
    window = _window(c1, window)
    predicted, detected = [], []
    for curve, f in ((1, c1), (2, c2)):
        for p in f.critical_points:
            if window.lo <= p.x <= window.hi:
                predicted.append(SurfaceCriticalPoint(curve, p.x, f(p.x)))
        for s in _detect_zeros(_boundary_x2_derivative(c1, c2, curve), window.lo, window.hi, tol, scan):
            detected.append(SurfaceCriticalPoint(curve, s, f(s)))
    unmatched_p = [p for p in predicted if not any(_close(p, q, tol) for q in detected)]
    unmatched_d = [q for q in detected if not any(_close(p, q, tol) for p in predicted)]
    return CorrespondenceReport(m, tol, tuple(predicted), tuple(detected), tuple(unmatched_p), tuple(unmatched_d))


def _close(p: SurfaceCriticalPoint, q: SurfaceCriticalPoint, tol: float) -> bool:
    return p.curve == q.curve and abs(p.s - q.s) <= tol * (1.0 + abs(p.s))


# -----------------------------------------------------------------------------
# fibers
# -----------------------------------------------------------------------------

def fiber_component_count(
    c1: FunctionSpec, c2: FunctionSpec, t: float, m: int = 3, window=None, n: int = 4001, atol: float = 1e-12
) -> int:
    """Components of the sampled fiber ``X ∩ {x1 = t}`` over the window.

    The fiber over a base point ``x2`` with ``g = (t - c1)(c2 - t) > 0`` is a
    sphere of dimension ``m - 2``: connected for ``m >= 3``, two points for
    ``m = 2``. Where ``g = 0`` it is a single point. Adjacent samples are
    joined when both lie over the region; the two sheets ``y = +-sqrt(g)``
    meet wherever ``g`` vanishes, which includes every interior end of a run
    of samples (the boundary root lies between the samples).
    """
    window = _window(c1, window)
    xs = np.linspace(window.lo, window.hi, n)
    g = (t - c1.values(xs)) * (c2.values(xs) - t)
    inside = g >= -atol
    sheets = 1 if m >= 3 else 2
    idx = np.arange(n * sheets).reshape(sheets, n)
    rows, cols = [], []
    for k in range(sheets):
        ok = inside[:-1] & inside[1:]
        rows.append(idx[k, :-1][ok])
        cols.append(idx[k, 1:][ok])
    if sheets == 2:
        # sheets meet where g vanishes, including between a run's last sample and the next outside one
        edge = np.zeros(n, dtype=bool)
        edge[1:] |= ~inside[:-1]
        edge[:-1] |= ~inside[1:]
        pinch = inside & ((g <= atol) | edge)
        rows.append(idx[0][pinch])
        cols.append(idx[1][pinch])
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    adj = coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n * sheets, n * sheets))
    _, labels = connected_components(adj, directed=False)
    present = np.tile(inside, sheets)
    return int(np.unique(labels[present]).size)


def region_point_inside(c1: FunctionSpec, c2: FunctionSpec, x1: float, x2: float) -> bool:
    return c1(x2) <= x1 <= c2(x2)


def surface_point(c1: FunctionSpec, c2: FunctionSpec, x1: float, x2: float, direction: Optional[Sequence[float]] = None, m: int = 3):
    """A point of X above region point ``(x1, x2)`` in the given y-direction."""
    g = (x1 - c1(x2)) * (c2(x2) - x1)
    if g < 0:
        raise ValueError("(x1, x2) lies outside the closed region")
    d = np.zeros(m - 1) if direction is None else np.asarray(direction, dtype=float)
    if direction is None:
        d[0] = 1.0
    d = d / np.linalg.norm(d)
    return (x1, x2, *(np.sqrt(g) * d))


__all__ = [
    "CorrespondenceReport",
    "ManifoldReport",
    "SurfaceCriticalPoint",
    "critical_correspondence",
    "defining_value",
    "fiber_component_count",
    "gradient",
    "region_point_inside",
    "sample_zero_set",
    "surface_point",
    "verify_manifold",
]
