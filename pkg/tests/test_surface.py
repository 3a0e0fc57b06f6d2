from __future__ import annotations

import math

import numpy as np
import pytest

from reeb_sandwich.funcspec import FunctionSpec
from reeb_sandwich.reeb import Carrier, event_levels, level_components, whole_line_declared
from reeb_sandwich.surface import (
    critical_correspondence,
    defining_value,
    fiber_component_count,
    gradient,
    sample_zero_set,
    verify_manifold,
)

from helpers import FIXTURES, specs


def test_defining_value_on_example_two():
    _, c1, c2 = specs("example2_t0_0.5")
    assert defining_value(c1, c2, 0.75, 0.0, [0.25]) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("s", [-2.0, 0.0, 1.3])
def test_boundary_points_are_on_the_zero_set(s):
    _, c1, c2 = specs("example1_1")
    for f in (c1, c2):
        assert defining_value(c1, c2, f(s), s, [0.0, 0.0]) == 0.0


def test_outside_the_region_is_negative():
    _, c1, c2 = specs("example2_t0_0.5")
    assert defining_value(c1, c2, 2.0, 0.0, [0.0]) < 0
    assert defining_value(c1, c2, 0.1, 0.0, [0.0]) < 0


def test_gradient_matches_finite_differences():
    _, c1, c2 = specs("example3_rotated")
    rng = np.random.default_rng(1)
    x1, x2, y = rng.normal(size=20), rng.uniform(-3, 3, 20), rng.normal(size=(20, 2))
    grad = gradient(c1, c2, x1, x2, y)
    h = 1e-6
    for i in range(20):
        p = np.array([x1[i], x2[i], *y[i]])
        for k in range(4):
            e = np.zeros(4)
            e[k] = h
            fd = (defining_value(c1, c2, *(p + e)[:2], (p + e)[2:]) - defining_value(c1, c2, *(p - e)[:2], (p - e)[2:])) / (2 * h)
            assert grad[i, k] == pytest.approx(fd, rel=1e-5, abs=1e-6)


@pytest.mark.parametrize("m", [2, 3, 5])
def test_samples_lie_on_the_zero_set(m):
    _, c1, c2 = specs("example1_1")
    x1, x2, y = sample_zero_set(c1, c2, m, 500, None, 3)
    assert y.shape == (500, m - 1)
    residual = (x1 - c1.values(x2)) * (c2.values(x2) - x1) - np.sum(y * y, axis=1)
    assert np.max(np.abs(residual)) < 1e-12


def test_sampling_is_seeded():
    _, c1, c2 = specs("example2_t0_0.5")
    a = sample_zero_set(c1, c2, 3, 100, None, 7)
    b = sample_zero_set(c1, c2, 3, 100, None, 7)
    assert all(np.array_equal(u, v) for u, v in zip(a, b))


@pytest.mark.parametrize("name, m", [("example1_1", 3), ("example2_t0_0.5", 2)])
def test_manifold_examples(name, m):
    _, c1, c2 = specs(name)
    report = verify_manifold(c1, c2, m, 10_000)
    assert report.passed and report.max_residual < 1e-12


def test_correspondence_example_two():
    _, c1, c2 = specs("example2_t0_0.5")
    report = critical_correspondence(c1, c2, 2)
    assert report.ok
    got = sorted(p.coords(2) for p in report.predicted)
    assert np.allclose(got, [(0.5, 0.0, 0.0), (1.0, 0.0, 0.0)], atol=1e-12)


def test_correspondence_example_one():
    _, c1, c2 = specs("example1_1")
    report = critical_correspondence(c1, c2, 3)
    assert report.ok
    zeros = sorted(p.s for p in report.predicted if p.curve == 1 and abs(p.height) < 1e-12)
    assert np.allclose(zeros, [k * math.pi for k in range(-3, 4)], atol=1e-9)


def test_correspondence_without_critical_points():
    c1 = FunctionSpec.build("c1", "x", window=(1, 2))
    c2 = FunctionSpec.build("c2", "x + 1", window=(1, 2))
    report = critical_correspondence(c1, c2, 3)
    assert report.ok and not report.predicted and not report.detected


def _window_fiber_count(comps, m: int) -> int:
    """Components of the window-restricted fiber predicted from the planar picture."""
    if m >= 3:
        return len(comps)
    both = lambda c: c.lo_carrier is Carrier.WINDOW and c.hi_carrier is Carrier.WINDOW  # noqa: E731
    return sum(2 if both(c) and not c.is_point else 1 for c in comps.components)


def _resolution(comps, window, per_feature: int = 8) -> int:
    """Grid size putting several samples in every component and every gap."""
    spans = [c.hi - c.lo for c in comps.components if not c.is_point]
    spans += [b.lo - a.hi for a, b in zip(comps.components, comps.components[1:])]
    finest = min(spans, default=window.width)
    return max(4001, int(per_feature * window.width / finest) + 1)


@pytest.mark.parametrize("m", [2, 3])
@pytest.mark.parametrize("name", FIXTURES)
def test_fibers_match_planar_components(name, m):
    cfg, c1, c2 = specs(name)
    levels, t_range = event_levels(c1, c2, cfg.interval)
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 50:
        t = rng.uniform(t_range.lo, t_range.hi)
        if min(abs(t - e) for e in levels) < 1e-3:
            continue
        comps = level_components(c1, c2, t, cfg.interval, m=m)
        n = _resolution(comps, cfg.interval)
        assert fiber_component_count(c1, c2, t, m, cfg.interval, n) == _window_fiber_count(comps, m)
        if m == 2 and whole_line_declared(c1, c2, t) and len(comps) == 1:
            # the doubling rule applies only when both curves are declared to stay apart at t
            assert comps.contour_count == 2
        checked += 1
