"""Metric pair, exact inverses, and both Christoffel families."""

import numpy as np
import pytest

from jetham.errors import DimensionError
from jetham.expr import Point, Var, const, evaluate, parse
from jetham.metrics import (
    SpaceMetric,
    TimeMetric,
    christoffel_space,
    christoffel_time,
    compatibility_residual,
    inverse_space,
    inverse_time,
    space_metric_det,
    transform_space_metric,
    transform_time_metric,
)

from helpers import central_diff, charts_for, curved_metric_2d, sampled_points

Q = Point.make(2.0, [2.0, 1.3], [3.0, 5.0])


def polar_style() -> SpaceMetric:
    return SpaceMetric.diagonal((const(1), parse("x1^2", 2)))


def eval_matrix(rows, q):
    return np.array([[evaluate(e, q) for e in row] for row in rows])


class TestInverseTime:
    def test_constant(self):
        assert evaluate(inverse_time(TimeMetric(const(1))), Q) == 1.0

    def test_exponential(self):
        h = TimeMetric(parse("exp(2*t)", 2))
        assert evaluate(inverse_time(h), Point.make(1.0, [1, 1], [0, 0])) == pytest.approx(
            np.exp(-2.0), rel=1e-12
        )

    def test_t_squared(self):
        assert evaluate(inverse_time(TimeMetric(parse("t^2", 2))), Q) == 0.25


class TestInverseSpace:
    def test_identity(self):
        g = SpaceMetric.diagonal((const(1), const(1)))
        assert np.array_equal(eval_matrix(inverse_space(g), Q), np.eye(2))

    def test_polar_style_against_adjugate_by_hand(self):
        # 2x2 adjugate oracle: inv(diag(1, x1^2)) = diag(1, x1^-2)
        gi = eval_matrix(inverse_space(polar_style()), Q)
        assert gi == pytest.approx(np.diag([1.0, 0.25]), rel=1e-12)

    def test_constant_metric_hand_inverse(self):
        g = SpaceMetric(2, ((const(2), const(1)), (const(1), const(1))))
        gi = eval_matrix(inverse_space(g), Q)
        assert gi == pytest.approx(np.array([[1.0, -1.0], [-1.0, 2.0]]), abs=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_against_numpy_inverse(self, n):
        # numpy is the independent oracle for the closed-form adjugate route
        entries = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                e = parse(f"x{min(i, j) + 1} + {2 if i == j else 0} + 1", n)
                entries[i][j] = entries[j][i] = e
        g = SpaceMetric(n, tuple(tuple(row) for row in entries))
        for q in sampled_points(n, 5, seed=31):
            gmat = eval_matrix(g.g, q)
            gi = eval_matrix(inverse_space(g), q)
            assert np.max(np.abs(gi - np.linalg.inv(gmat))) < 1e-9

    def test_delta_property_on_samples(self):
        g = curved_metric_2d()
        gi = inverse_space(g)
        for q in sampled_points(2, 10, seed=37):
            prod = eval_matrix(g.g, q) @ eval_matrix(gi, q)
            assert np.max(np.abs(prod - np.eye(2))) < 1e-9

    def test_dimension_limit(self):
        n = 5
        g = SpaceMetric.diagonal(tuple(const(1) for _ in range(n)))
        with pytest.raises(DimensionError):
            inverse_space(g)

    def test_determinant_matches_numpy(self):
        g = curved_metric_2d()
        for q in sampled_points(2, 5, seed=41):
            want = np.linalg.det(eval_matrix(g.g, q))
            assert evaluate(space_metric_det(g), q) == pytest.approx(want, rel=1e-12)


class TestChristoffelTime:
    def test_flat(self):
        assert str(christoffel_time(TimeMetric(const(1))).H111) == "0"

    def test_exponential_is_identically_one(self):
        H = christoffel_time(TimeMetric(parse("exp(2*t)", 2))).H111
        for tval in (0.5, 1.0, 1.7, 2.0):
            assert evaluate(H, Point.make(tval, [1, 1], [0, 0])) == pytest.approx(
                1.0, rel=1e-12
            )

    def test_t_squared(self):
        H = christoffel_time(TimeMetric(parse("t^2", 2))).H111
        assert evaluate(H, Q) == pytest.approx(0.5, rel=1e-12)

    def test_against_finite_differences(self):
        # oracle: H = h^-1 h' / 2 with h' from central differences
        h_expr = parse("exp(t) + t^2", 1)
        H = christoffel_time(TimeMetric(h_expr)).H111
        for q in sampled_points(1, 10, seed=43):
            fd = central_diff(h_expr, Var.time(), q)
            want = 0.5 * fd / evaluate(h_expr, q)
            assert evaluate(H, q) == pytest.approx(want, rel=1e-6)


class TestChristoffelSpace:
    def test_flat(self):
        cs = christoffel_space(SpaceMetric.diagonal((const(1), const(1))))
        assert all(
            str(cs.gamma[i][j][k]) == "0"
            for i in range(2) for j in range(2) for k in range(2)
        )

    def test_constant_coefficients(self):
        g = SpaceMetric(2, ((const(2), const(1)), (const(1), const(1))))
        cs = christoffel_space(g)
        assert all(
            evaluate(cs.gamma[i][j][k], Q) == 0.0
            for i in range(2) for j in range(2) for k in range(2)
        )

    def test_polar_style_closed_form(self):
        cs = christoffel_space(polar_style())
        got = {
            (i, j, k): evaluate(cs.gamma[i][j][k], Q)
            for i in range(2) for j in range(2) for k in range(2)
        }
        want = {(0, 1, 1): -2.0, (1, 0, 1): 0.5, (1, 1, 0): 0.5}
        for key, value in got.items():
            assert value == pytest.approx(want.get(key, 0.0), abs=1e-12), key

    def test_symmetry_is_tree_level(self):
        cs = christoffel_space(curved_metric_2d())
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    assert cs.gamma[i][j][k] is cs.gamma[i][k][j] or cs.gamma[i][j][k] == cs.gamma[i][k][j]

    def test_against_finite_difference_levi_civita(self):
        # independent oracle: assemble gamma from numeric derivatives of g
        g = curved_metric_2d()
        cs = christoffel_space(g)
        n = 2
        for q in sampled_points(n, 5, seed=47):
            dg = np.empty((n, n, n))
            for i in range(n):
                for j in range(n):
                    for k in range(n):
                        dg[i, j, k] = central_diff(g.g[i][j], Var.space(k), q)
            ginv = np.linalg.inv(eval_matrix(g.g, q))
            for i in range(n):
                for j in range(n):
                    for k in range(n):
                        want = 0.5 * sum(
                            ginv[i, l] * (dg[l, j, k] + dg[l, k, j] - dg[j, k, l])
                            for l in range(n)
                        )
                        assert evaluate(cs.gamma[i][j][k], q) == pytest.approx(
                            want, rel=1e-6, abs=1e-6
                        )

    def test_metric_compatibility(self):
        for g in (polar_style(), curved_metric_2d()):
            cs = christoffel_space(g)
            for q in sampled_points(2, 10, seed=53):
                assert compatibility_residual(g, cs, q) < 1e-9

    def test_dimension_limit(self):
        g = SpaceMetric.diagonal(tuple(const(1) for _ in range(5)))
        with pytest.raises(DimensionError):
            christoffel_space(g)


class TestTransform:
    def test_time_metric_transport_is_tensorial(self):
        h = TimeMetric(parse("exp(2*t)", 2))
        for c in charts_for(2).values():
            ht = transform_time_metric(h, c)
            from jetham.charts import induced_point
            for q in sampled_points(2, 5, seed=59):
                image = induced_point(c, q)
                got = evaluate(ht.h11, image) * evaluate(c.dt_fwd, q) ** 2
                assert got == pytest.approx(evaluate(h.h11, q), rel=1e-9)

    def test_space_metric_transport_is_tensorial(self):
        g = curved_metric_2d()
        for c in charts_for(2).values():
            gt = transform_space_metric(g, c)
            from jetham.charts import induced_point, transition
            for q in sampled_points(2, 5, seed=61):
                td = transition(c, q)
                image = induced_point(c, q)
                pulled = td.jac.T @ eval_matrix(gt.g, image) @ td.jac
                assert np.max(np.abs(pulled - eval_matrix(g.g, q))) < 1e-9


class TestValidation:
    def test_symmetry_required(self):
        with pytest.raises(DimensionError, match="differ"):
            SpaceMetric(2, ((const(1), parse("x1", 2)), (parse("x2", 2), const(1))))

    def test_time_metric_must_depend_on_t_only(self):
        with pytest.raises(DimensionError):
            TimeMetric(parse("x1", 2))

    def test_space_metric_must_depend_on_x_only(self):
        with pytest.raises(DimensionError):
            SpaceMetric.diagonal((parse("t", 1),))
