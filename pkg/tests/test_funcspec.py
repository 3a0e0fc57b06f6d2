from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from reeb_sandwich.errors import DeclarationContradiction, OrderViolation
from reeb_sandwich.expr import Interval
from reeb_sandwich.funcspec import (
    CriticalKind,
    Direction,
    FunctionSpec,
    Side,
    SignVsLimit,
    TailDeclaration,
    isolate_critical_points,
    validate_pair,
    verify_declarations,
)

from helpers import FIXTURES, specs

EX1_C1 = "sin(x)^2/(2*(x^2+1))"
BUMP = "1/(x^2+1)"


def _bump_tails(limit=0.0):
    return (
        TailDeclaration(Side.NEG, limit, (0.0, Direction.INCREASING), False, SignVsLimit.STRICTLY_ABOVE),
        TailDeclaration(Side.POS, limit, (0.0, Direction.DECREASING), False, SignVsLimit.STRICTLY_ABOVE),
    )


# -- declarations ---------------------------------------------------------------

def test_monotone_tail_cannot_have_unbounded_critical_set():
    with pytest.raises(ValueError):
        TailDeclaration(Side.POS, 0.0, (1.0, Direction.DECREASING), True)


def test_sign_requires_finite_limit():
    with pytest.raises(ValueError):
        TailDeclaration(Side.POS, math.inf, sign_vs_limit=SignVsLimit.CROSSES)


def test_tail_json_round_trip():
    t = TailDeclaration(Side.NEG, -math.inf, (-3.0, Direction.INCREASING), False)
    d = t.to_dict()
    assert d["limit"] == "-inf"
    assert TailDeclaration.from_dict("-inf", d) == t


def test_negation_flips_direction_and_sign():
    t = _bump_tails()[1].negated()
    assert t.limit == 0.0 and t.direction is Direction.INCREASING
    assert t.sign_vs_limit is SignVsLimit.STRICTLY_BELOW


# -- critical point isolation ---------------------------------------------------

def test_bump_has_single_maximum():
    (p,) = FunctionSpec.build("c2", BUMP).critical_points
    assert p.x == pytest.approx(0.0, abs=1e-10)
    assert p.value == pytest.approx(1.0)
    assert p.kind is CriticalKind.LOCAL_MAX


def test_example_one_lower_curve_on_half_period():
    pts = isolate_critical_points(FunctionSpec.build("c1", EX1_C1).expr, (0.0, math.pi))
    assert [p.kind for p in pts] == [CriticalKind.LOCAL_MIN, CriticalKind.LOCAL_MAX, CriticalKind.LOCAL_MIN]
    # interior maximum solves tan x = (x^2 + 1)/x
    xmax = brentq(lambda x: math.tan(x) - (x * x + 1) / x, 0.5, 1.5, xtol=1e-15)
    assert pts[0].x == pytest.approx(0.0, abs=1e-9) and pts[0].value == pytest.approx(0.0, abs=1e-15)
    assert pts[1].x == pytest.approx(xmax, abs=1e-9)
    assert pts[2].x == pytest.approx(math.pi, abs=1e-9) and pts[2].value == pytest.approx(0.0, abs=1e-15)


def test_linear_function_has_no_critical_points():
    assert isolate_critical_points(FunctionSpec.build("f", "x").expr, (-10, 10)) == []


def test_touch_zero_is_found():
    # derivative (x-1)^2 touches zero without changing sign
    pts = isolate_critical_points(FunctionSpec.build("f", "(x-1)^3/3").expr, (-2, 3))
    assert len(pts) == 1
    assert pts[0].x == pytest.approx(1.0, abs=1e-4)
    assert pts[0].kind is CriticalKind.INFLECTION


def _poly_source(coeffs) -> str:
    n = len(coeffs) - 1
    return " + ".join(f"({c!r})*x^{n - i}" if n - i > 0 else f"({c!r})" for i, c in enumerate(coeffs))


@given(
    st.lists(st.integers(min_value=-40, max_value=40), min_size=1, max_size=7, unique=True),
    st.sampled_from([-1.0, 1.0, 0.5, 2.0]),
)
@settings(max_examples=60, deadline=None)
def test_polynomial_completeness(root_tenths, scale):
    """Derivative roots chosen up front are exactly what isolation returns."""
    roots = sorted(r / 10 for r in root_tenths)
    deriv = scale * np.poly(roots)
    coeffs = np.polyint(deriv)
    f = FunctionSpec.build("p", _poly_source(coeffs.tolist()), window=(-5, 5))
    found = [p.x for p in f.critical_points]
    assert len(found) == len(roots)
    assert np.allclose(found, roots, atol=1e-7)
    for p in f.critical_points:
        assert p.bracket.width <= 1e-9 or p.bracket.lo <= p.x <= p.bracket.hi


@pytest.mark.parametrize("name", FIXTURES)
def test_brackets_sorted_and_disjoint(name):
    _, c1, c2 = specs(name)
    for f in (c1, c2):
        pts = f.critical_points
        assert all(a.x < b.x for a, b in zip(pts, pts[1:]))
        assert all(a.bracket.hi < b.bracket.lo for a, b in zip(pts, pts[1:]))
        assert all(p.bracket.width <= 1e-9 and p.bracket.lo <= p.x <= p.bracket.hi for p in pts)


# -- ordering ---------------------------------------------------------------------

@pytest.mark.parametrize("lower", [EX1_C1, "0.5/(x^2+1)"])
def test_validate_pair_certifies(lower):
    cert = validate_pair(FunctionSpec.build("c1", lower), FunctionSpec.build("c2", BUMP))
    assert cert.min_gap > 0


def test_equal_functions_are_rejected():
    f = FunctionSpec.build("c", BUMP)
    with pytest.raises(OrderViolation):
        validate_pair(f, f)


@pytest.mark.parametrize("name", FIXTURES)
def test_validate_pair_is_antisymmetric(name):
    _, c1, c2 = specs(name)
    validate_pair(c1, c2)
    with pytest.raises(OrderViolation):
        validate_pair(c2, c1)


# -- declaration checks -------------------------------------------------------------

def test_example_one_upper_curve_declarations_pass():
    f = FunctionSpec.build("c2", BUMP, _bump_tails(), window=(-3 * math.pi, 3 * math.pi))
    report = verify_declarations(f)
    assert report.ok and all(i.status in ("pass", "skip") for i in report.items)


def test_example_one_second_lower_curve_declarations_pass():
    _, c1, _ = specs("example1_2")
    report = verify_declarations(c1)
    assert report.ok
    assert not [i for i in report.items if i.status == "warn"]


def test_wrong_limit_is_a_contradiction():
    f = FunctionSpec.build("c2", BUMP, _bump_tails(limit=1.0))
    with pytest.raises(DeclarationContradiction):
        verify_declarations(f)


def test_wrong_direction_is_a_contradiction():
    tails = (
        TailDeclaration(Side.NEG, 0.0, (0.0, Direction.DECREASING), False),
        TailDeclaration(Side.POS, 0.0, (0.0, Direction.DECREASING), False),
    )
    with pytest.raises(DeclarationContradiction):
        verify_declarations(FunctionSpec.build("c2", BUMP, tails))


@pytest.mark.parametrize("name", FIXTURES)
def test_bundled_declarations_have_no_contradictions(name):
    _, c1, c2 = specs(name)
    assert verify_declarations(c1).ok and verify_declarations(c2).ok


def test_window_interval_is_kept():
    f = FunctionSpec.build("c", BUMP, window=(-1, 2))
    assert f.window == Interval(-1, 2)
    assert f.with_window((-3, 3)).window == Interval(-3, 3)
