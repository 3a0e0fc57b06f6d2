from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reeb_sandwich import expr as ex
from reeb_sandwich.errors import ArityError, ExprDomainError, ExprSyntaxError, UnknownIdentifierError
from reeb_sandwich.expr import Add, Const, Div, Func, Interval, Mul, Neg, Pow, X

from strategies import expressions, points


# -- parsing ------------------------------------------------------------------

def test_parse_rational():
    assert ex.parse("1/(x^2+1)") == Div(Const(1), Add(Pow(X, 2), Const(1)))


def test_parse_example_one_lower_curve():
    e = ex.parse("sin(x)^2/(2*(x^2+1))")
    assert e == Div(Pow(Func("sin", X), 2), Mul(Const(2), Add(Pow(X, 2), Const(1))))


@pytest.mark.parametrize(
    "source, tree",
    [
        ("x - 1 - 2", ex.Sub(ex.Sub(X, Const(1)), Const(2))),
        ("x / 2 / 4", Div(Div(X, Const(2)), Const(4))),
        ("-x^2", Neg(Pow(X, 2))),
        ("2*-x", Mul(Const(2), Neg(X))),
        ("-2", Const(-2)),
        ("-2^2", Neg(Pow(Const(2), 2))),
        ("x^-1", Pow(X, -1)),
        ("pi", Const(math.pi)),
        ("1e-3*x", Mul(Const(1e-3), X)),
    ],
)
def test_precedence_and_associativity(source, tree):
    assert ex.parse(source) == tree


def test_unbalanced_parenthesis_offset():
    with pytest.raises(ExprSyntaxError) as info:
        ex.parse("1/(x^2")
    assert info.value.offset == 6


@pytest.mark.parametrize(
    "source, error",
    [("y + 1", UnknownIdentifierError), ("log(x)", UnknownIdentifierError), ("sin(x, 2)", ArityError),
     ("sin()", ArityError), ("", ExprSyntaxError), ("x +", ExprSyntaxError), ("x^x", ExprSyntaxError)],
)
def test_parse_errors(source, error):
    with pytest.raises(error):
        ex.parse(source)


# -- evaluation ----------------------------------------------------------------

def test_eval_examples():
    e = ex.parse("1/(x^2+1)")
    assert ex.evaluate(e, 0.0) == 1.0
    assert ex.evaluate(e, 1.0) == 0.5
    assert abs(ex.evaluate(ex.parse("sin(x)^2/(2*(x^2+1))"), math.pi)) < 1e-12


@pytest.mark.parametrize("source, x", [("1/x", 0.0), ("sqrt(x)", -1.0), ("exp(x)", 1000.0), ("x^0.5", -2.0)])
def test_domain_errors_are_raised(source, x):
    with pytest.raises(ExprDomainError):
        ex.evaluate(ex.parse(source), x)


def test_array_evaluation_matches_scalar():
    e = ex.parse("sin(x)^2/(2*(x^2+1)) + (1+tanh(x-5))/2*(x+2*sin(x))")
    xs = np.linspace(-10, 20, 101)
    assert np.allclose(ex.evaluate_array(e, xs), [ex.evaluate(e, x) for x in xs], rtol=1e-13, atol=1e-14)


def test_array_domain_error():
    with pytest.raises(ExprDomainError):
        ex.evaluate_array(ex.parse("1/x"), np.array([-1.0, 0.0, 1.0]))


# -- differentiation ----------------------------------------------------------

def test_derivative_of_bump():
    d = ex.differentiate(ex.parse("1/(x^2+1)"))
    for x in (-2.0, -0.3, 0.0, 1.5):
        assert ex.evaluate(d, x) == pytest.approx(-2 * x / (x * x + 1) ** 2, rel=1e-14, abs=1e-15)


def test_derivative_of_constant_is_zero():
    assert ex.differentiate(ex.parse("3*pi + 2")) == Const(0)


def test_derivative_matches_finite_differences_example_one():
    e = ex.parse("sin(x)^2/(2*(x^2+1))")
    d = ex.differentiate(e)
    xs = np.linspace(-3 * math.pi, 3 * math.pi, 1000)
    h = 1e-5
    fd = (ex.evaluate_array(e, xs + h) - ex.evaluate_array(e, xs - h)) / (2 * h)
    sym = ex.evaluate_array(d, xs)
    assert np.all(np.abs(sym - fd) <= 1e-6 * np.maximum(1.0, np.abs(sym)))


def test_substitute_composes():
    e = ex.substitute(ex.parse("x^2 + 1"), ex.parse("sin(x)"))
    assert ex.evaluate(e, 0.7) == pytest.approx(math.sin(0.7) ** 2 + 1)


# -- intervals ----------------------------------------------------------------

@pytest.mark.parametrize(
    "source, box, inner",
    [("x^2", (-1, 2), (0, 4)), ("1/(x^2+1)", (0, 1), (0.5, 1)), ("sin(x)", (0, math.pi), (0, 1))],
)
def test_interval_enclosures(source, box, inner):
    r = ex.eval_interval(ex.parse(source), Interval(*box))
    assert r.lo <= inner[0] and r.hi >= inner[1]


def test_interval_singularity():
    with pytest.raises(ExprDomainError):
        ex.eval_interval(ex.parse("1/x"), Interval(-1, 1))


def test_point_sign_is_certified():
    assert ex.point_sign(ex.parse("x - 1"), 2.0) == 1
    assert ex.point_sign(ex.parse("x - 1"), 0.0) == -1
    assert ex.point_sign(ex.parse("sin(x)"), math.pi) in (0, 1)


# -- properties ---------------------------------------------------------------

@given(expressions)
@settings(max_examples=200, deadline=None)
def test_print_parse_round_trip(e):
    assert ex.parse(ex.to_source(e)) == e


@given(expressions, points)
@settings(max_examples=300, deadline=None)
def test_derivative_soundness(e, x):
    d = ex.differentiate(e)
    h = 1e-5
    fd = (ex.evaluate(e, x + h) - ex.evaluate(e, x - h)) / (2 * h)
    value = ex.evaluate(d, x)
    assert abs(value - fd) <= 1e-5 * (1 + abs(value))


@given(expressions, points, st.floats(min_value=0, max_value=2))
@settings(max_examples=300, deadline=None)
def test_interval_encloses_samples(e, a, width):
    box = Interval(a, a + width)
    r = ex.eval_interval(e, box)
    xs = np.linspace(box.lo, box.hi, 100)
    vals = np.array([ex.evaluate(e, x) for x in xs])
    assert np.all(vals >= r.lo) and np.all(vals <= r.hi)
