"""Shared fixtures: chart suites per dimension, metric pairs, the seeded
random expression generator, and the finite-difference oracle."""

from __future__ import annotations

import math
import random
from fractions import Fraction

from jetham.errors import DomainError
from jetham.expr import (
    Add,
    Const,
    Coord,
    Cos,
    Div,
    Exp,
    Expr,
    Log,
    Mul,
    Neg,
    Point,
    Pow,
    Sin,
    Sub,
    Var,
    const,
    diff,
    parse,
)
from jetham.charts import CoordChange
from jetham.metrics import SpaceMetric, TimeMetric

# Cardano's closed-form inverse of y = s + s^3 (written in the DSL with the
# negative cube root folded into a difference of positive roots)
CARDANO_T = (
    "(t/2 + (t^2/4 + (1/27))^(1/2))^(1/3)"
    " - ((t^2/4 + (1/27))^(1/2) - t/2)^(1/3)"
)
CARDANO_X1 = (
    "(x1/2 + (x1^2/4 + (1/27))^(1/2))^(1/3)"
    " - ((x1^2/4 + (1/27))^(1/2) - x1/2)^(1/3)"
)


def chart(n: int, t_fwd: str, t_inv: str, x_fwd: list[str], x_inv: list[str]) -> CoordChange:
    return CoordChange(
        n,
        parse(t_fwd, n),
        parse(t_inv, n),
        tuple(parse(s, n) for s in x_fwd),
        tuple(parse(s, n) for s in x_inv),
    )


def charts_for(n: int) -> dict[str, CoordChange]:
    """Chart suite: one affine change plus three genuinely nonlinear ones,
    all regular on the sampling box t, x in [0.5, 2]."""
    if n == 1:
        return {
            "affine": chart(1, "2*t", "t/2", ["3*x1"], ["x1/3"]),
            "squares": chart(1, "t^2", "t^(1/2)", ["x1^2"], ["x1^(1/2)"]),
            "cubic_t": chart(1, "t + t^3", CARDANO_T, ["2*x1"], ["x1/2"]),
            "exp_t": chart(1, "exp(t)", "log(t)", ["x1 + x1^3"], [CARDANO_X1]),
        }
    if n == 2:
        return {
            "affine": chart(2, "2*t", "t/2", ["3*x1", "x2/2"], ["x1/3", "2*x2"]),
            "shear": chart(
                2, "t^2", "t^(1/2)", ["x1 + x2^3", "x2"], ["x1 - x2^3", "x2"]
            ),
            "stretch": chart(
                2, "exp(t)", "log(t)", ["2*x1", "x1*x2"], ["x1/2", "2*x2/x1"]
            ),
            "cubic_t": chart(
                2, "t + t^3", CARDANO_T, ["x1*exp(x2)", "x2"], ["x1/exp(x2)", "x2"]
            ),
        }
    if n == 3:
        return {
            "affine": chart(
                3, "2*t", "t/2",
                ["3*x1", "x2/2", "x3"], ["x1/3", "2*x2", "x3"],
            ),
            "shear": chart(
                3, "t^2", "t^(1/2)",
                ["x1 + x3^3", "x2", "x3"], ["x1 - x3^3", "x2", "x3"],
            ),
            "stretch": chart(
                3, "exp(t)", "log(t)",
                ["2*x1", "x2*exp(x3)", "x3"], ["x1/2", "x2/exp(x3)", "x3"],
            ),
            "cubic_t": chart(
                3, "t + t^3", CARDANO_T,
                ["x1", "x1*x2", "x3"], ["x1", "x2/x1", "x3"],
            ),
        }
    raise ValueError(f"no chart suite for n={n}")


def nonlinear_charts_for(n: int) -> dict[str, CoordChange]:
    return {k: v for k, v in charts_for(n).items() if k != "affine"}


def metric_pair(n: int) -> tuple[TimeMetric, SpaceMetric]:
    h = TimeMetric(parse("exp(2*t)", n))
    if n == 1:
        g = SpaceMetric.diagonal((parse("1 + x1^2", 1),))
    elif n == 2:
        g = SpaceMetric.diagonal((const(1), parse("x1^2", 2)))
    else:
        g = SpaceMetric.diagonal((const(1), parse("x1^2", 3), parse("exp(2*x2)", 3)))
    return h, g


def curved_metric_2d() -> SpaceMetric:
    """Non-diagonal metric with det = 1 + x1^2 + x2^2 > 0 everywhere."""
    off = parse("x1*x2", 2)
    return SpaceMetric(
        2,
        (
            (parse("1 + x2^2", 2), off),
            (off, parse("1 + x1^2", 2)),
        ),
    )


# ---------------------------------------------------------------------------
# Finite-difference oracle
# ---------------------------------------------------------------------------

FD_REL_STEP = 1e-6


def shift(q: Point, v: Var, delta: float) -> Point:
    if v.kind == "t":
        return Point(q.t + delta, q.x, q.p)
    if v.kind == "x":
        x = list(q.x)
        x[v.index] += delta
        return Point(q.t, tuple(x), q.p)
    p = list(q.p)
    p[v.index] += delta
    return Point(q.t, q.x, tuple(p))


def central_diff(e: Expr, v: Var, q: Point) -> float:
    h = FD_REL_STEP * max(1.0, abs(q.coord(v)))
    return (e.eval(shift(q, v, h)) - e.eval(shift(q, v, -h))) / (2.0 * h)


# ---------------------------------------------------------------------------
# Seeded random expression generator (generate-and-filter)
# ---------------------------------------------------------------------------

EXPONENTS = (
    Fraction(-2),
    Fraction(-1),
    Fraction(2),
    Fraction(3),
    Fraction(1, 2),
    Fraction(1, 3),
)

MAGNITUDE_CAP = 1e3  # on every subexpression of e, e', e'' at the point


def _children(e: Expr):
    if isinstance(e, (Add, Sub, Mul, Div)):
        return (e.left, e.right)
    if isinstance(e, Pow):
        return (e.base,)
    if isinstance(e, (Neg, Exp, Log, Sin, Cos)):
        return (e.arg,)
    return ()


def max_abs_subvalue(e: Expr, q: Point) -> float:
    worst = abs(e.eval(q))
    for child in _children(e):
        worst = max(worst, max_abs_subvalue(child, q))
    return worst


def random_expr(rng: random.Random, n: int, depth: int = 4, at_root: bool = True) -> Expr:
    """Leaves uniform over variables and constants in [-2, 2]; operators
    uniform with log and division excluded at the root."""
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.5:
            return Const(round(rng.uniform(-2.0, 2.0), 4))
        kind = rng.choice(["t", "x", "p"])
        idx = rng.randrange(n)
        return Coord(Var(kind, idx if kind != "t" else 0))
    ops = ["add", "sub", "mul", "div", "pow", "exp", "log", "sin", "cos", "neg"]
    if at_root:
        ops = [op for op in ops if op not in ("log", "div")]
    op = rng.choice(ops)
    a = random_expr(rng, n, depth - 1, False)
    if op == "add":
        return a + random_expr(rng, n, depth - 1, False)
    if op == "sub":
        return a - random_expr(rng, n, depth - 1, False)
    if op == "mul":
        return a * random_expr(rng, n, depth - 1, False)
    if op == "div":
        return a / random_expr(rng, n, depth - 1, False)
    if op == "pow":
        return a ** rng.choice(EXPONENTS)
    if op == "exp":
        return Exp(a)
    if op == "log":
        return Log(a)
    if op == "sin":
        return Sin(a)
    if op == "cos":
        return Cos(a)
    return -a


def random_point(rng: random.Random, n: int) -> Point:
    """t, x in [0.5, 2], p in [-3, 3]: the singularity-avoiding box."""
    return Point(
        rng.uniform(0.5, 2.0),
        tuple(rng.uniform(0.5, 2.0) for _ in range(n)),
        tuple(rng.uniform(-3.0, 3.0) for _ in range(n)),
    )


def derivative_pairs(seed: int, count: int):
    """Yield `count` well-conditioned (expr, var, point) triples.

    Candidates are rejected when any subexpression of the expression or of
    its first two derivatives exceeds MAGNITUDE_CAP at the point (or at the
    finite-difference stencil points), which keeps the central-difference
    comparison meaningful.
    """
    rng = random.Random(seed)
    produced = 0
    while produced < count:
        n = rng.choice([1, 2, 3])
        e = random_expr(rng, n)
        q = random_point(rng, n)
        variables = sorted(e.free_vars(), key=lambda v: (v.kind, v.index))
        if not variables:
            continue
        v = rng.choice(variables)
        h = FD_REL_STEP * max(1.0, abs(q.coord(v)))
        try:
            de = diff(e, v)
            d2e = diff(de, v)
            magnitude = max(
                max_abs_subvalue(e, q),
                max_abs_subvalue(e, shift(q, v, h)),
                max_abs_subvalue(e, shift(q, v, -h)),
                max_abs_subvalue(de, q),
                max_abs_subvalue(d2e, q),
            )
            derivative = de.eval(q)
        except DomainError:
            continue
        if magnitude > MAGNITUDE_CAP or not math.isfinite(derivative):
            continue
        produced += 1
        yield e, v, q


def sampled_points(n: int, count: int, seed: int) -> list[Point]:
    rng = random.Random(seed)
    return [random_point(rng, n) for _ in range(count)]
