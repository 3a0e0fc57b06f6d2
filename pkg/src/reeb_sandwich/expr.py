"""Closed-form expressions of one real variable.

Grammar (EBNF)::

    expr     := term (("+" | "-") term)*
    term     := unary (("*" | "/") unary)*
    unary    := "-" unary | power
    power    := atom ("^" unary)?          # exponent must fold to a constant
    atom     := NUMBER | "x" | "pi" | "e" | FUNC "(" expr ")" | "(" expr ")"
    FUNC     := "sin" | "cos" | "tanh" | "exp" | "sqrt"
    NUMBER   := digits ["." digits] [("e"|"E") ["+"|"-"] digits]

``-`` directly followed by a numeric literal (and not by ``^``) is read as a
negative constant, so ``-2`` is ``Const(-2.0)`` while ``-2^2`` is
``Neg(Pow(Const(2.0), 2.0))``.

Nodes are frozen dataclasses and compare structurally.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import ArityError, ExprDomainError, ExprSyntaxError, UnknownIdentifierError

FUNCTIONS = ("sin", "cos", "tanh", "exp", "sqrt")
CONSTANTS = {"pi": math.pi, "e": math.e}


class Expr:
    __slots__ = ()

    # operator sugar so fixtures and tests can build trees directly
    def __add__(self, other):
        return Add(self, _lift(other))

    def __radd__(self, other):
        return Add(_lift(other), self)

    def __sub__(self, other):
        return Sub(self, _lift(other))

    def __rsub__(self, other):
        return Sub(_lift(other), self)

    def __mul__(self, other):
        return Mul(self, _lift(other))

    def __rmul__(self, other):
        return Mul(_lift(other), self)

    def __truediv__(self, other):
        return Div(self, _lift(other))

    def __rtruediv__(self, other):
        return Div(_lift(other), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, exponent):
        return Pow(self, float(exponent))

    def __str__(self):
        return to_source(self)


@dataclass(frozen=True, eq=True, repr=True)
class Const(Expr):
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ExprDomainError(f"non-finite constant {self.value!r}")
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True)
class Var(Expr):
    pass


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Func(Expr):
    name: str
    arg: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: float

    def __post_init__(self):
        object.__setattr__(self, "exponent", float(self.exponent))


X = Var()
BINARY = (Add, Sub, Mul, Div)


def _lift(value) -> Expr:
    return value if isinstance(value, Expr) else Const(float(value))


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, (Const, Var)):
        return ()
    if isinstance(e, (Neg, Func)):
        return (e.arg,)
    if isinstance(e, Pow):
        return (e.base,)
    return (e.left, e.right)


def has_var(e: Expr) -> bool:
    if isinstance(e, Var):
        return True
    return any(has_var(c) for c in children(e))


def size(e: Expr) -> int:
    return 1 + sum(size(c) for c in children(e))


# -----------------------------------------------------------------------------
# parsing
# -----------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(source, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {source[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self, k: int = 0):
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, pos = self.peek()
        if text != value or kind == "end":
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", pos)
        return self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r}", pos)
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.advance()[1]
            right = self.term()
            left = Add(left, right) if op == "+" else Sub(left, right)
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.advance()[1]
            right = self.unary()
            left = Mul(left, right) if op == "*" else Div(left, right)
        return left

    def unary(self) -> Expr:
        kind, text, _ = self.peek()
        if kind == "op" and text == "-":
            self.advance()
            nxt, after = self.peek(), self.peek(1)
            if nxt[0] == "num" and after[1] != "^":
                self.advance()
                return Const(-float(nxt[1]))
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[1] == "^" and self.peek()[0] == "op":
            _, _, pos = self.advance()
            exponent = self.unary()
            if has_var(exponent):
                raise ExprSyntaxError("exponent must be constant", pos + 1)
            try:
                value = evaluate(exponent, 0.0)
            except ExprDomainError as exc:
                raise ExprSyntaxError(f"exponent not evaluable ({exc})", pos + 1) from None
            return Pow(base, value)
        return base

    def atom(self) -> Expr:
        kind, text, pos = self.peek()
        if kind == "num":
            self.advance()
            return Const(float(text))
        if kind == "name":
            self.advance()
            if text == "x":
                return X
            if text in CONSTANTS:
                return Const(CONSTANTS[text])
            if text in FUNCTIONS:
                if self.peek()[1] != "(":
                    raise ExprSyntaxError(f"expected '(' after {text}", self.peek()[2])
                self.advance()
                if self.peek()[1] == ")":
                    raise ArityError(f"{text} takes exactly one argument, got 0", self.peek()[2])
                arg = self.expr()
                if self.peek()[1] == ",":
                    raise ArityError(f"{text} takes exactly one argument", self.peek()[2])
                self.expect(")")
                return Func(text, arg)
            raise UnknownIdentifierError(f"unknown identifier {text!r}", pos)
        if kind == "op" and text == "(":
            self.advance()
            inner = self.expr()
            self.expect(")")
            return inner
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"unexpected {found}", pos)


def parse(source: str) -> Expr:
    """Parse ``source`` into an expression tree."""
    if not source or not source.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(source).parse()


# -----------------------------------------------------------------------------
# printing
# -----------------------------------------------------------------------------

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4}
_SYMBOL = {Add: "+", Sub: "-", Mul: "*", Div: "/"}


def _prec(e: Expr) -> int:
    return _PREC.get(type(e), 5)


def _num(value: float) -> str:
    text = repr(float(value))
    return f"(-{text[1:]})" if value < 0 or text.startswith("-") else text


def to_source(e: Expr) -> str:
    """Render ``e`` so that ``parse(to_source(e)) == e``."""
    if isinstance(e, Const):
        return _num(e.value)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Func):
        return f"{e.name}({to_source(e.arg)})"
    if isinstance(e, Neg):
        inner = to_source(e.arg)
        if isinstance(e.arg, Const) or _prec(e.arg) < 3:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, Pow):
        base = to_source(e.base)
        if _prec(e.base) < 5:
            base = f"({base})"
        return f"{base} ^ {_num(e.exponent)}"
    p = _prec(e)
    left = to_source(e.left)
    right = to_source(e.right)
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left} {_SYMBOL[type(e)]} {right}"


# -----------------------------------------------------------------------------
# point evaluation
# -----------------------------------------------------------------------------

def _py_source(e: Expr) -> str:
    if isinstance(e, Const):
        return repr(e.value)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Neg):
        return f"(-{_py_source(e.arg)})"
    if isinstance(e, Func):
        return f"_m.{e.name}({_py_source(e.arg)})"
    if isinstance(e, Pow):
        return f"_pow({_py_source(e.base)}, {e.exponent!r})"
    return f"({_py_source(e.left)} {_SYMBOL[type(e)]} {_py_source(e.right)})"


def _np_source(e: Expr) -> str:
    if isinstance(e, Const):
        return repr(e.value)
    if isinstance(e, Var):
        return "x"
    if isinstance(e, Neg):
        return f"(-{_np_source(e.arg)})"
    if isinstance(e, Func):
        return f"_np.{e.name}({_np_source(e.arg)})"
    if isinstance(e, Pow):
        return f"_npow({_np_source(e.base)}, {e.exponent!r})"
    return f"({_np_source(e.left)} {_SYMBOL[type(e)]} {_np_source(e.right)})"


def _pow(base: float, exponent: float) -> float:
    if exponent == int(exponent) and abs(exponent) < 2**31:
        n = int(exponent)
        if n < 0:
            return 1.0 / base ** (-n)
        return base**n
    return math.pow(base, exponent)


def _npow(base, exponent: float):
    if exponent == int(exponent) and abs(exponent) < 2**31:
        n = int(exponent)
        if n < 0:
            return 1.0 / np.power(base, -n)
        return np.power(base, n)
    if np.any(np.asarray(base) < 0):
        raise FloatingPointError("fractional power of a negative number")
    return np.power(base, exponent)


_compiled: dict[Expr, Callable] = {}
_compiled_np: dict[Expr, Callable] = {}


def compile_scalar(e: Expr) -> Callable[[float], float]:
    """Return a fast ``float -> float`` callable raising ExprDomainError."""
    fn = _compiled.get(e)
    if fn is None:
        raw = eval(f"lambda x: {_py_source(e)}", {"_m": math, "_pow": _pow})

        def fn(x, _raw=raw):
            try:
                value = _raw(float(x))
            except (ZeroDivisionError, ValueError, OverflowError) as exc:
                raise ExprDomainError(f"{exc} at x={x!r}") from None
            if not math.isfinite(value):
                raise ExprDomainError(f"non-finite value at x={x!r}")
            return value

        _compiled[e] = fn
    return fn


def compile_array(e: Expr) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorised evaluator; raises ExprDomainError if any element fails."""
    fn = _compiled_np.get(e)
    if fn is None:
        raw = eval(f"lambda x: {_np_source(e)}", {"_np": np, "_npow": _npow})

        def fn(xs, _raw=raw):
            xs = np.asarray(xs, dtype=float)
            with np.errstate(divide="raise", invalid="raise", over="raise"):
                try:
                    out = _raw(xs)
                except (FloatingPointError, ZeroDivisionError) as exc:
                    raise ExprDomainError(str(exc)) from None
            return np.broadcast_to(np.asarray(out, dtype=float), xs.shape).copy()

        _compiled_np[e] = fn
    return fn


def evaluate(e: Expr, x: float) -> float:
    return compile_scalar(e)(x)


def evaluate_array(e: Expr, xs) -> np.ndarray:
    return compile_array(e)(xs)


# -----------------------------------------------------------------------------
# differentiation with light simplification
# -----------------------------------------------------------------------------

def _is(e: Expr, value: float) -> bool:
    return isinstance(e, Const) and e.value == value


def add(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    if _is(a, 0.0):
        return b
    if _is(b, 0.0):
        return a
    if isinstance(b, Neg):
        return sub(a, b.arg)
    return Add(a, b)


def _addends(e: Expr) -> list[tuple[int, Expr]]:
    if isinstance(e, Add):
        return _addends(e.left) + _addends(e.right)
    if isinstance(e, Sub):
        return _addends(e.left) + [(-s, t) for s, t in _addends(e.right)]
    return [(1, e)]


def _rebuild(terms: list[tuple[int, Expr]]) -> Expr:
    out: Expr = Const(0.0)
    for sign, term in terms:
        out = add(out, term) if sign > 0 else sub(out, term)
    return out


def sub(a: Expr, b: Expr) -> Expr:
    """``a - b`` with folding and cancellation of structurally equal addends."""
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    if _is(b, 0.0):
        return a
    if a == b:
        return Const(0.0)
    left, right = _addends(a), _addends(b)
    if len(left) > 1 or len(right) > 1:
        remaining = list(right)
        kept = []
        for term in left:
            if term in remaining:
                remaining.remove(term)
            else:
                kept.append(term)
        if len(kept) + len(remaining) < len(left) + len(right):
            return sub(_rebuild(kept), _rebuild(remaining))
    if _is(a, 0.0):
        return neg(b)
    return Sub(a, b)


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def mul(a: Expr, b: Expr) -> Expr:
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    if _is(a, 0.0) or _is(b, 0.0):
        return Const(0.0)
    if _is(a, 1.0):
        return b
    if _is(b, 1.0):
        return a
    if _is(a, -1.0):
        return neg(b)
    if _is(b, -1.0):
        return neg(a)
    if isinstance(b, Const) and not isinstance(a, Const):
        a, b = b, a
    if isinstance(a, Const) and isinstance(b, Mul) and isinstance(b.left, Const):
        return mul(Const(a.value * b.left.value), b.right)
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is(a, 0.0):
        return Const(0.0)
    if _is(b, 1.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0.0:
        return Const(a.value / b.value)
    return Div(a, b)


def power(base: Expr, exponent: float) -> Expr:
    if exponent == 0.0:
        return Const(1.0)
    if exponent == 1.0:
        return base
    if isinstance(base, Const):
        try:
            return Const(_pow(base.value, exponent))
        except (ValueError, ZeroDivisionError, OverflowError):
            pass
    if isinstance(base, Pow) and float(exponent).is_integer() and float(base.exponent).is_integer():
        return power(base.base, base.exponent * exponent)
    return Pow(base, exponent)


def func(name: str, arg: Expr) -> Expr:
    if isinstance(arg, Const):
        return Const(evaluate(Func(name, arg), 0.0))
    return Func(name, arg)


def differentiate(e: Expr) -> Expr:
    """Exact symbolic derivative with respect to ``x``."""
    if isinstance(e, Const):
        return Const(0.0)
    if isinstance(e, Var):
        return Const(1.0)
    if isinstance(e, Neg):
        return neg(differentiate(e.arg))
    if isinstance(e, Add):
        return add(differentiate(e.left), differentiate(e.right))
    if isinstance(e, Sub):
        return sub(differentiate(e.left), differentiate(e.right))
    if isinstance(e, Mul):
        u, v = e.left, e.right
        return add(mul(differentiate(u), v), mul(u, differentiate(v)))
    if isinstance(e, Div):
        u, v = e.left, e.right
        du, dv = differentiate(u), differentiate(v)
        if not has_var(v):
            return div(du, v)
        if not has_var(u):
            return neg(div(mul(u, dv), power(v, 2.0)))
        return div(sub(mul(du, v), mul(u, dv)), power(v, 2.0))
    if isinstance(e, Pow):
        du = differentiate(e.base)
        n = e.exponent
        return mul(mul(Const(n), power(e.base, n - 1.0)), du)
    if isinstance(e, Func):
        u = e.arg
        du = differentiate(u)
        if e.name == "sin":
            outer = func("cos", u)
        elif e.name == "cos":
            outer = neg(func("sin", u))
        elif e.name == "tanh":
            outer = sub(Const(1.0), power(func("tanh", u), 2.0))
        elif e.name == "exp":
            outer = func("exp", u)
        elif e.name == "sqrt":
            return div(du, mul(Const(2.0), func("sqrt", u)))
        else:  # pragma: no cover - parser rejects unknown names
            raise ExprDomainError(f"cannot differentiate {e.name}")
        return mul(outer, du)
    raise TypeError(f"not an expression node: {e!r}")


def substitute(e: Expr, replacement: Expr) -> Expr:
    """Replace every occurrence of ``x`` by ``replacement``."""
    if isinstance(e, Var):
        return replacement
    if isinstance(e, Const):
        return e
    if isinstance(e, Neg):
        return Neg(substitute(e.arg, replacement))
    if isinstance(e, Func):
        return Func(e.name, substitute(e.arg, replacement))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, replacement), e.exponent)
    return type(e)(substitute(e.left, replacement), substitute(e.right, replacement))


# -----------------------------------------------------------------------------
# interval evaluation
# -----------------------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not self.lo <= self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def __contains__(self, value: float) -> bool:
        return self.lo <= value <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def sign(self) -> int:
        """+1 / -1 when the sign is certified, 0 otherwise."""
        if self.lo > 0.0:
            return 1
        if self.hi < 0.0:
            return -1
        return 0

    def split(self) -> tuple["Interval", "Interval"]:
        m = self.mid
        return Interval(self.lo, m), Interval(m, self.hi)

    def as_list(self) -> list[float]:
        return [self.lo, self.hi]


def _ulp_out(lo, hi, k: int = 1):
    lo = lo - k * np.abs(np.spacing(lo))
    hi = hi + k * np.abs(np.spacing(hi))
    return lo, hi


_HALF_PI = math.pi / 2
_TWO_PI = 2 * math.pi


def _attains(lo, hi, phase: float):
    """True where some ``phase + 2*pi*k`` may lie in [lo, hi] (conservative)."""
    k = np.floor((lo - phase) / _TWO_PI)
    slack = 1e-12 * (1.0 + np.maximum(np.abs(lo), np.abs(hi)))
    hit = np.zeros(np.shape(lo), dtype=bool)
    for dk in (0.0, 1.0, 2.0):
        p = phase + (k + dk) * _TWO_PI
        hit |= (p >= lo - slack) & (p <= hi + slack)
    return hit


def _periodic(lo, hi, fn, max_phase: float, min_phase: float):
    a, b = fn(lo), fn(hi)
    rlo, rhi = np.minimum(a, b), np.maximum(a, b)
    rlo, rhi = _ulp_out(rlo, rhi, 4)
    rhi = np.where(_attains(lo, hi, max_phase), 1.0, rhi)
    rlo = np.where(_attains(lo, hi, min_phase), -1.0, rlo)
    wide = (hi - lo) >= _TWO_PI
    rlo = np.where(wide, -1.0, np.maximum(rlo, -1.0))
    rhi = np.where(wide, 1.0, np.minimum(rhi, 1.0))
    return rlo, rhi


def _imul(alo, ahi, blo, bhi):
    with np.errstate(invalid="ignore"):
        p = np.stack([alo * blo, alo * bhi, ahi * blo, ahi * bhi])
    p = np.where(np.isnan(p), 0.0, p)  # 0 * inf
    return _ulp_out(p.min(axis=0), p.max(axis=0))


def _ipow_int(lo, hi, n: int):
    with np.errstate(over="ignore"):
        a, b = np.power(lo, n), np.power(hi, n)
    if n % 2 == 1:
        return _ulp_out(a, b, 2)
    rlo = np.where(lo >= 0, a, np.where(hi <= 0, b, 0.0))
    rhi = np.maximum(a, b)
    rlo, rhi = _ulp_out(rlo, rhi, 2)
    return np.maximum(rlo, 0.0), rhi


def _interval_eval(e: Expr, lo, hi, bad):
    """Return (lo, hi) enclosures; ``bad`` accumulates domain failures in place."""
    if isinstance(e, Const):
        v = np.full(np.shape(lo), e.value)
        return v, v.copy()
    if isinstance(e, Var):
        return lo, hi
    if isinstance(e, Neg):
        a, b = _interval_eval(e.arg, lo, hi, bad)
        return -b, -a
    if isinstance(e, (Add, Sub, Mul, Div)):
        alo, ahi = _interval_eval(e.left, lo, hi, bad)
        blo, bhi = _interval_eval(e.right, lo, hi, bad)
        with np.errstate(invalid="ignore", over="ignore"):
            if isinstance(e, Add):
                return _ulp_out(alo + blo, ahi + bhi)
            if isinstance(e, Sub):
                return _ulp_out(alo - bhi, ahi - blo)
            if isinstance(e, Mul):
                return _imul(alo, ahi, blo, bhi)
        zero = (blo <= 0.0) & (bhi >= 0.0)
        bad |= zero
        with np.errstate(divide="ignore"):
            rlo, rhi = _ulp_out(1.0 / np.where(zero, 1.0, bhi), 1.0 / np.where(zero, 1.0, blo))
        qlo, qhi = _imul(alo, ahi, rlo, rhi)
        return np.where(zero, -np.inf, qlo), np.where(zero, np.inf, qhi)
    if isinstance(e, Pow):
        blo, bhi = _interval_eval(e.base, lo, hi, bad)
        p = e.exponent
        if p == 0.0:
            one = np.ones(np.shape(lo))
            return one, one.copy()
        if p.is_integer():
            n = int(p)
            if n > 0:
                return _ipow_int(blo, bhi, n)
            plo, phi = _ipow_int(blo, bhi, -n)
            zero = plo <= 0.0
            bad |= zero
            with np.errstate(divide="ignore"):
                rlo, rhi = _ulp_out(1.0 / np.where(zero, 1.0, phi), 1.0 / np.where(zero, 1.0, plo))
            return np.where(zero, 0.0, rlo), np.where(zero, np.inf, rhi)
        neg_base = blo < 0.0 if p > 0 else blo <= 0.0
        bad |= neg_base
        safe_lo = np.maximum(blo, 0.0)
        with np.errstate(divide="ignore", over="ignore"):
            a, b = np.power(safe_lo, p), np.power(np.maximum(bhi, 0.0), p)
        if p > 0:
            rlo, rhi = _ulp_out(a, b, 2)
        else:
            rlo, rhi = _ulp_out(b, a, 2)
        return np.maximum(rlo, 0.0), rhi
    if isinstance(e, Func):
        alo, ahi = _interval_eval(e.arg, lo, hi, bad)
        finite = np.isfinite(alo) & np.isfinite(ahi)
        slo, shi = np.where(finite, alo, 0.0), np.where(finite, ahi, 0.0)
        name = e.name
        if name == "sin":
            rlo, rhi = _periodic(slo, shi, np.sin, _HALF_PI, -_HALF_PI)
        elif name == "cos":
            rlo, rhi = _periodic(slo, shi, np.cos, 0.0, math.pi)
        elif name == "tanh":
            rlo, rhi = _ulp_out(np.tanh(alo), np.tanh(ahi), 4)
            return np.maximum(rlo, -1.0), np.minimum(rhi, 1.0)
        elif name == "exp":
            with np.errstate(over="ignore"):
                rlo, rhi = _ulp_out(np.exp(alo), np.exp(ahi), 4)
            return np.maximum(rlo, 0.0), rhi
        elif name == "sqrt":
            bad |= alo < 0.0
            rlo, rhi = _ulp_out(np.sqrt(np.maximum(alo, 0.0)), np.sqrt(np.maximum(ahi, 0.0)), 2)
            return np.maximum(rlo, 0.0), rhi
        else:  # pragma: no cover
            raise ExprDomainError(f"unknown function {name}")
        return np.where(finite, rlo, -1.0), np.where(finite, rhi, 1.0)
    raise TypeError(f"not an expression node: {e!r}")


def eval_interval_array(e: Expr, lo, hi) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised enclosure over boxes ``[lo[i], hi[i]]``.

    Returns ``(lo, hi, bad)``; where ``bad`` is set the enclosure is
    ``[-inf, inf]``-like and a scalar call would have raised.
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    bad = np.zeros(lo.shape, dtype=bool)
    rlo, rhi = _interval_eval(e, lo, hi, bad)
    rlo = np.broadcast_to(rlo, lo.shape).astype(float)
    rhi = np.broadcast_to(rhi, lo.shape).astype(float)
    rlo = np.where(bad | np.isnan(rlo), -np.inf, rlo)
    rhi = np.where(bad | np.isnan(rhi), np.inf, rhi)
    return rlo, rhi, bad


def eval_interval(e: Expr, interval: Union[Interval, tuple[float, float]]) -> Interval:
    """Enclosure of ``{e(x) : x in interval}``."""
    if not isinstance(interval, Interval):
        interval = Interval(*interval)
    lo, hi, bad = eval_interval_array(e, [interval.lo], [interval.hi])
    if bad[0]:
        raise ExprDomainError(f"{to_source(e)} is singular or undefined on [{interval.lo}, {interval.hi}]")
    return Interval(lo[0], hi[0])


def point_sign(e: Expr, x: float) -> int:
    """Certified sign of ``e(x)``: +1, -1, or 0 when rounding cannot decide."""
    lo, hi, bad = eval_interval_array(e, [x], [x])
    if bad[0]:
        return 0
    if lo[0] > 0.0:
        return 1
    if hi[0] < 0.0:
        return -1
    return 0
