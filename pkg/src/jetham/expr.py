"""Closed-form scalar expressions over (t, x^1..x^n, p_1..p_n).

Expressions are immutable trees supporting exact symbolic differentiation,
IEEE-double evaluation at a point, and simultaneous substitution.  The node
set (constants, coordinates, +, -, *, /, rational powers, exp, log, sin,
cos, negation) is closed under differentiation, so every derivative an
operation needs is again a tree of the same kind and carries no
differentiation error.

Construction goes through smart constructors that fold the 0/1 identities
(x+0, x*1, x*0, x^1, ...).  No further simplification is attempted:
correctness is defined by evaluation, not by canonical form.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .errors import (
    DimensionError,
    DomainError,
    ExprSyntaxError,
    MissingSubstitutionError,
)

__all__ = [
    "Var",
    "Point",
    "Expr",
    "Const",
    "Coord",
    "const",
    "tvar",
    "xvar",
    "pvar",
    "esum",
    "parse",
    "diff",
    "evaluate",
    "compose",
]


# ---------------------------------------------------------------------------
# Variables and points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    """A coordinate variable: the time t, a position x^i, or a momentum p_i."""

    kind: str  # "t", "x", or "p"
    index: int = 0

    def __post_init__(self):
        if self.kind not in ("t", "x", "p"):
            raise ValueError(f"unknown variable kind {self.kind!r}")
        if self.index < 0:
            raise ValueError("variable index must be non-negative")

    @classmethod
    def time(cls) -> "Var":
        return cls("t")

    @classmethod
    def space(cls, i: int) -> "Var":
        return cls("x", i)

    @classmethod
    def momentum(cls, i: int) -> "Var":
        return cls("p", i)

    @property
    def name(self) -> str:
        # 1-based in the surface syntax, 0-based internally
        return "t" if self.kind == "t" else f"{self.kind}{self.index + 1}"


@dataclass(frozen=True)
class Point:
    """A point (t, x, p) on the time-dependent phase space of momenta."""

    t: float
    x: tuple[float, ...]
    p: tuple[float, ...]

    def __post_init__(self):
        if len(self.x) != len(self.p):
            raise DimensionError(
                f"x has length {len(self.x)} but p has length {len(self.p)}"
            )

    @classmethod
    def make(cls, t: float, x: Iterable[float], p: Iterable[float]) -> "Point":
        return cls(float(t), tuple(float(v) for v in x), tuple(float(v) for v in p))

    @classmethod
    def from_flat(cls, values: Iterable[float], n: int) -> "Point":
        vals = [float(v) for v in values]
        if len(vals) != 2 * n + 1:
            raise DimensionError(f"expected {2 * n + 1} coordinates, got {len(vals)}")
        return cls(vals[0], tuple(vals[1 : n + 1]), tuple(vals[n + 1 :]))

    @property
    def n(self) -> int:
        return len(self.x)

    def flat(self) -> tuple[float, ...]:
        return (self.t, *self.x, *self.p)

    def coord(self, v: Var) -> float:
        if v.kind == "t":
            return self.t
        axis = self.x if v.kind == "x" else self.p
        if v.index >= len(axis):
            raise DimensionError(f"variable {v.name} out of range for n={self.n}")
        return axis[v.index]


# ---------------------------------------------------------------------------
# Expression nodes
# ---------------------------------------------------------------------------

Number = Union[int, float]


class Expr:
    """Base class; all nodes are immutable and hash/compare structurally."""

    __slots__ = ()

    # -- construction sugar -------------------------------------------------
    def __add__(self, other):
        return _add(self, _coerce(other))

    def __radd__(self, other):
        return _add(_coerce(other), self)

    def __sub__(self, other):
        return _sub(self, _coerce(other))

    def __rsub__(self, other):
        return _sub(_coerce(other), self)

    def __mul__(self, other):
        return _mul(self, _coerce(other))

    def __rmul__(self, other):
        return _mul(_coerce(other), self)

    def __truediv__(self, other):
        return _div(self, _coerce(other))

    def __rtruediv__(self, other):
        return _div(_coerce(other), self)

    def __pow__(self, exponent):
        return _pow(self, Fraction(exponent))

    def __neg__(self):
        return _neg(self)

    # -- core operations (overridden per node) ------------------------------
    def diff(self, v: Var) -> "Expr":
        raise NotImplementedError

    def eval(self, q: Point) -> float:
        raise NotImplementedError

    def substitute(self, mapping: Mapping[Var, "Expr"]) -> "Expr":
        """Simultaneous substitution; variables absent from the map are kept."""
        raise NotImplementedError

    def free_vars(self) -> frozenset[Var]:
        raise NotImplementedError


@dataclass(frozen=True)
class Const(Expr):
    value: float

    def diff(self, v):
        return ZERO

    def eval(self, q):
        return self.value

    def substitute(self, mapping):
        return self

    def free_vars(self):
        return frozenset()

    def __str__(self):
        return _fmt_number(self.value)


@dataclass(frozen=True)
class Coord(Expr):
    var: Var

    def diff(self, v):
        return ONE if self.var == v else ZERO

    def eval(self, q):
        return q.coord(self.var)

    def substitute(self, mapping):
        return mapping.get(self.var, self)

    def free_vars(self):
        return frozenset((self.var,))

    def __str__(self):
        return self.var.name


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr

    def diff(self, v):
        return _add(self.left.diff(v), self.right.diff(v))

    def eval(self, q):
        return self.left.eval(q) + self.right.eval(q)

    def substitute(self, mapping):
        return _add(self.left.substitute(mapping), self.right.substitute(mapping))

    def free_vars(self):
        return self.left.free_vars() | self.right.free_vars()

    def __str__(self):
        # right operand keeps its parentheses at equal precedence so the
        # reparsed association (and hence float evaluation) is identical
        return f"{_paren(self.left, 1)} + {_paren(self.right, 2)}"


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr

    def diff(self, v):
        return _sub(self.left.diff(v), self.right.diff(v))

    def eval(self, q):
        return self.left.eval(q) - self.right.eval(q)

    def substitute(self, mapping):
        return _sub(self.left.substitute(mapping), self.right.substitute(mapping))

    def free_vars(self):
        return self.left.free_vars() | self.right.free_vars()

    def __str__(self):
        return f"{_paren(self.left, 1)} - {_paren(self.right, 2)}"


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr

    def diff(self, v):
        return _add(
            _mul(self.left.diff(v), self.right),
            _mul(self.left, self.right.diff(v)),
        )

    def eval(self, q):
        return self.left.eval(q) * self.right.eval(q)

    def substitute(self, mapping):
        return _mul(self.left.substitute(mapping), self.right.substitute(mapping))

    def free_vars(self):
        return self.left.free_vars() | self.right.free_vars()

    def __str__(self):
        return f"{_paren(self.left, 2)} * {_paren(self.right, 3)}"


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr

    def diff(self, v):
        num = _sub(
            _mul(self.left.diff(v), self.right),
            _mul(self.left, self.right.diff(v)),
        )
        return _div(num, _pow(self.right, Fraction(2)))

    def eval(self, q):
        denom = self.right.eval(q)
        if denom == 0.0:
            raise DomainError("division by zero", self)
        return self.left.eval(q) / denom

    def substitute(self, mapping):
        return _div(self.left.substitute(mapping), self.right.substitute(mapping))

    def free_vars(self):
        return self.left.free_vars() | self.right.free_vars()

    def __str__(self):
        return f"{_paren(self.left, 2)} / {_paren(self.right, 3)}"


@dataclass(frozen=True)
class Pow(Expr):
    """base^r with an exact rational exponent.

    Integer exponents accept any base (except 0 to a negative power);
    fractional exponents require a strictly positive base at evaluation.
    """

    base: Expr
    exponent: Fraction

    def diff(self, v):
        r = self.exponent
        return _mul(
            _mul(Const(float(r)), _pow(self.base, r - 1)),
            self.base.diff(v),
        )

    def eval(self, q):
        b = self.base.eval(q)
        r = self.exponent
        if r.denominator == 1:
            e = int(r)
            if b == 0.0 and e < 0:
                raise DomainError("zero raised to a negative power", self)
            try:
                return b**e
            except OverflowError:
                raise DomainError("overflow in power", self) from None
        if b <= 0.0:
            raise DomainError("fractional power of a non-positive base", self)
        try:
            return b ** float(r)
        except OverflowError:
            raise DomainError("overflow in power", self) from None

    def substitute(self, mapping):
        return _pow(self.base.substitute(mapping), self.exponent)

    def free_vars(self):
        return self.base.free_vars()

    def __str__(self):
        r = self.exponent
        exp_txt = f"^{r.numerator}" if r.denominator == 1 else f"^({r.numerator}/{r.denominator})"
        return f"{_paren(self.base, 4)}{exp_txt}"


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr

    def diff(self, v):
        return _neg(self.arg.diff(v))

    def eval(self, q):
        return -self.arg.eval(q)

    def substitute(self, mapping):
        return _neg(self.arg.substitute(mapping))

    def free_vars(self):
        return self.arg.free_vars()

    def __str__(self):
        return f"-{_paren(self.arg, 4)}"


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr

    def diff(self, v):
        return _mul(self, self.arg.diff(v))

    def eval(self, q):
        try:
            return math.exp(self.arg.eval(q))
        except OverflowError:
            raise DomainError("overflow in exp", self) from None

    def substitute(self, mapping):
        return Exp(self.arg.substitute(mapping))

    def free_vars(self):
        return self.arg.free_vars()

    def __str__(self):
        return f"exp({self.arg})"


@dataclass(frozen=True)
class Log(Expr):
    arg: Expr

    def diff(self, v):
        return _div(self.arg.diff(v), self.arg)

    def eval(self, q):
        value = self.arg.eval(q)
        if value <= 0.0:
            raise DomainError("log of a non-positive value", self)
        return math.log(value)

    def substitute(self, mapping):
        return Log(self.arg.substitute(mapping))

    def free_vars(self):
        return self.arg.free_vars()

    def __str__(self):
        return f"log({self.arg})"


@dataclass(frozen=True)
class Sin(Expr):
    arg: Expr

    def diff(self, v):
        return _mul(Cos(self.arg), self.arg.diff(v))

    def eval(self, q):
        return math.sin(self.arg.eval(q))

    def substitute(self, mapping):
        return Sin(self.arg.substitute(mapping))

    def free_vars(self):
        return self.arg.free_vars()

    def __str__(self):
        return f"sin({self.arg})"


@dataclass(frozen=True)
class Cos(Expr):
    arg: Expr

    def diff(self, v):
        return _neg(_mul(Sin(self.arg), self.arg.diff(v)))

    def eval(self, q):
        return math.cos(self.arg.eval(q))

    def substitute(self, mapping):
        return Cos(self.arg.substitute(mapping))

    def free_vars(self):
        return self.arg.free_vars()

    def __str__(self):
        return f"cos({self.arg})"


ZERO = Const(0.0)
ONE = Const(1.0)

_FUNCS = {"exp": Exp, "log": Log, "sin": Sin, "cos": Cos}


# ---------------------------------------------------------------------------
# Smart constructors: fold the 0/1 identities and literal arithmetic
# ---------------------------------------------------------------------------

def _coerce(value) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float)):
        return Const(float(value))
    raise TypeError(f"cannot use {type(value).__name__} as an expression")


def _is_const(e: Expr, value: float | None = None) -> bool:
    return isinstance(e, Const) and (value is None or e.value == value)


def _add(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    return Add(a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return _neg(b)
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    return Sub(a, b)


def _mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    return Mul(a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 1.0):
        return a
    if _is_const(a, 0.0) and not _is_const(b, 0.0):
        return ZERO
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0.0:
        return Const(a.value / b.value)
    return Div(a, b)


def _pow(base: Expr, exponent: Fraction) -> Expr:
    if exponent == 1:
        return base
    if exponent == 0:
        return ONE
    if (
        isinstance(base, Const)
        and exponent.denominator == 1
        and (base.value != 0.0 or exponent > 0)
    ):
        try:
            return Const(base.value ** int(exponent))
        except OverflowError:
            pass
    return Pow(base, exponent)


def _neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def const(value: Number) -> Expr:
    return Const(float(value))


def tvar() -> Expr:
    return Coord(Var.time())


def xvar(i: int) -> Expr:
    return Coord(Var.space(i))


def pvar(i: int) -> Expr:
    return Coord(Var.momentum(i))


def esum(terms: Iterable[Expr]) -> Expr:
    """Fold a sum, dropping structural zeros."""
    total: Expr = ZERO
    for term in terms:
        total = _add(total, term)
    return total


# ---------------------------------------------------------------------------
# Module-level operations
# ---------------------------------------------------------------------------

def diff(e: Expr, v: Var) -> Expr:
    """Exact algebraic derivative of e with respect to the variable v."""
    return e.diff(v)


def evaluate(e: Expr, q: Point) -> float:
    """IEEE double value of e at q; raises DomainError outside the domain."""
    return e.eval(q)


def compose(e: Expr, subst: Mapping[Var, Expr]) -> Expr:
    """Simultaneous substitution; every variable of e must be covered."""
    missing = e.free_vars() - set(subst)
    if missing:
        names = ", ".join(sorted(v.name for v in missing))
        raise MissingSubstitutionError(f"no substitution for variable(s) {names}")
    return e.substitute(subst)


# ---------------------------------------------------------------------------
# Printing support
# ---------------------------------------------------------------------------

_PRECEDENCE = {
    Add: 1,
    Sub: 1,
    Mul: 2,
    Div: 2,
    Neg: 1,  # "-" binds a whole base; parenthesize whenever it is an operand
    Pow: 3,
}


def _prec(e: Expr) -> int:
    if isinstance(e, Const):
        return 1 if e.value < 0 else 4
    return _PRECEDENCE.get(type(e), 4)


def _paren(e: Expr, at_least: int) -> str:
    text = str(e)
    return f"({text})" if _prec(e) < at_least else text


def _fmt_number(value: float) -> str:
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(value)


# ---------------------------------------------------------------------------
# Parser: recursive descent over the surface grammar
#
#   expr   := term (("+"|"-") term)*
#   term   := factor (("*"|"/") factor)*
#   factor := base ("^" rational)?
#   base   := number | ident | "(" expr ")" | func "(" expr ")" | "-" base
#   ident  := "t" | "x" digits | "p" digits      (1-based indices)
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z]+\d*)
  | (?P<op>[-+*/^()])
    """,
    re.VERBOSE,
)


class _Parser:
    def __init__(self, src: str, n: int):
        self.src = src
        self.n = n
        self.tokens: list[tuple[str, str, int]] = []  # (kind, text, offset)
        self._lex()
        self.pos = 0

    def _lex(self):
        i = 0
        while i < len(self.src):
            m = _TOKEN_RE.match(self.src, i)
            if m is None:
                raise ExprSyntaxError(f"unexpected character {self.src[i]!r}", i)
            if m.lastgroup != "ws":
                self.tokens.append((m.lastgroup, m.group(), i))
            i = m.end()
        self.tokens.append(("eof", "", len(self.src)))

    def _peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def _next(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def _expect(self, text: str):
        kind, got, offset = self._peek()
        if got != text:
            raise ExprSyntaxError(f"expected {text!r}, found {got or 'end of input'!r}", offset)
        self._next()

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, offset = self._peek()
        if kind != "eof":
            raise ExprSyntaxError(f"unexpected {text!r} after expression", offset)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self._peek()[1] in ("+", "-"):
            op = self._next()[1]
            rhs = self.term()
            e = _add(e, rhs) if op == "+" else _sub(e, rhs)
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self._peek()[1] in ("*", "/"):
            op = self._next()[1]
            rhs = self.factor()
            e = _mul(e, rhs) if op == "*" else _div(e, rhs)
        return e

    def factor(self) -> Expr:
        e = self.base()
        if self._peek()[1] == "^":
            self._next()
            e = _pow(e, self.rational())
        return e

    def base(self) -> Expr:
        kind, text, offset = self._next()
        if text == "-":
            return _neg(self.base())
        if text == "(":
            e = self.expr()
            self._expect(")")
            return e
        if kind == "number":
            return Const(float(text))
        if kind == "ident":
            if text in _FUNCS:
                self._expect("(")
                arg = self.expr()
                self._expect(")")
                return _FUNCS[text](arg)
            return Coord(self._resolve_var(text, offset))
        raise ExprSyntaxError(f"unexpected {text or 'end of input'!r}", offset)

    def _resolve_var(self, text: str, offset: int) -> Var:
        if text == "t":
            return Var.time()
        head, digits = text[0], text[1:]
        if head in ("x", "p") and digits.isdigit():
            index = int(digits)
            if not 1 <= index <= self.n:
                raise ExprSyntaxError(
                    f"index of {text!r} out of range for dimension n={self.n}", offset
                )
            return Var(head, index - 1)
        raise ExprSyntaxError(f"unknown identifier {text!r}", offset)

    def rational(self) -> Fraction:
        sign = 1
        if self._peek()[1] == "-":
            self._next()
            sign = -1
        kind, text, offset = self._peek()
        if kind == "number" and text.isdigit():
            self._next()
            return Fraction(sign * int(text))
        if text == "(":
            self._next()
            num = self._integer()
            den = 1
            if self._peek()[1] == "/":
                self._next()
                den = self._integer()
            self._expect(")")
            return Fraction(sign * num, den)
        raise ExprSyntaxError("expected an integer or (integer/integer) exponent", offset)

    def _integer(self) -> int:
        sign = 1
        if self._peek()[1] == "-":
            self._next()
            sign = -1
        kind, text, offset = self._next()
        if kind != "number" or not text.isdigit():
            raise ExprSyntaxError("expected an integer", offset)
        return sign * int(text)


def parse(src: str, n: int) -> Expr:
    """Parse DSL source into an expression tree for ambient dimension n."""
    if n < 1:
        raise DimensionError(f"ambient dimension must be >= 1, got {n}")
    return _Parser(src, n).parse()
