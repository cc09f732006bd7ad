"""Adapted frames and coframes: duality, triangularity, tensoriality,
and the three-way decomposition of vector fields."""

import random

import numpy as np
import pytest

from jetham.errors import PreconditionError
from jetham.expr import Point, ZERO, ONE, const, parse
from jetham.frames import (
    adapted_coframe,
    adapted_frame,
    decompose,
    pairing,
    reconstruct,
    verify_adapted_tensoriality,
)
from jetham.metrics import SpaceMetric, TimeMetric, transform_space_metric, transform_time_metric
from jetham.nlconn import NonlinearConnection, canonical_connection
from helpers import (
    charts_for,
    metric_pair,
    nonlinear_charts_for,
    random_expr,
    sampled_points,
)

Q = Point.make(1.0, [2.0, 1.0], [3.0, 5.0])


def zero_connection(n):
    return NonlinearConnection(
        n, (ZERO,) * n, ((ZERO,) * n,) * n
    )


def random_connection(rng, n):
    temporal = tuple(random_expr(rng, n, depth=3, at_root=True) for _ in range(n))
    spatial = tuple(
        tuple(random_expr(rng, n, depth=3, at_root=True) for _ in range(n))
        for _ in range(n)
    )
    return NonlinearConnection(n, temporal, spatial)


class TestAdaptedFrame:
    def test_zero_connection_is_natural_frame(self):
        F = adapted_frame(zero_connection(2))
        assert np.array_equal(F.evaluate(Q), np.eye(5))

    def test_canonical_delta_t_row(self):
        h, g = metric_pair(2)
        F = adapted_frame(canonical_connection(h, g))
        row = F.evaluate(Q)[0]
        # h = exp(2t): N1 = p, so the p-columns carry -p = (-3, -5)
        assert row == pytest.approx([1.0, 0.0, 0.0, -3.0, -5.0])

    def test_canonical_delta_x_row(self):
        g = SpaceMetric.diagonal((const(1), parse("x1^2", 2)))
        N = canonical_connection(TimeMetric(const(1)), g)
        F = adapted_frame(N)
        # entry (x1-row, p2-col) = -N_(2)1 = gamma^k_21 p_k = 2.5 at Q
        assert F.evaluate(Q)[1, 4] == pytest.approx(2.5, rel=1e-12)

    def test_unit_triangular_determinant_one(self):
        from jetham.errors import DomainError

        rng = random.Random(199)
        for n in (1, 2, 3):
            done = 0
            while done < 3:
                N = random_connection(rng, n)
                try:
                    mats = [adapted_frame(N).evaluate(q) for q in sampled_points(n, 5, seed=211)]
                except DomainError:
                    continue  # random expressions may leave their domain; redraw
                for m in mats:
                    assert np.linalg.det(m) == pytest.approx(1.0, rel=1e-12)
                    assert np.array_equal(np.diag(m), np.ones(2 * n + 1))
                    # only the p-columns of the t/x rows may be nonzero off-diagonal
                    off = m - np.diag(np.diag(m))
                    off[: n + 1, n + 1 :] = 0.0
                    assert np.all(off == 0.0)
                done += 1


class TestAdaptedCoframe:
    def test_zero_connection_is_natural_coframe(self):
        C = adapted_coframe(zero_connection(2))
        assert np.array_equal(C.evaluate(Q), np.eye(5))

    def test_delta_p_row_carries_connection_in_dt_column(self):
        h, g = metric_pair(2)
        C = adapted_coframe(canonical_connection(h, g))
        # delta p_1 = dp_1 + N_(1)1 dt + N_(1)j dx^j with N1_1 = p_1 = 3
        assert C.evaluate(Q)[3, 0] == pytest.approx(3.0, rel=1e-12)

    def test_unit_triangular(self):
        rng = random.Random(223)
        N = random_connection(rng, 2)
        for q in sampled_points(2, 5, seed=227):
            m = adapted_coframe(N).evaluate(q)
            assert np.array_equal(np.diag(m), np.ones(5))
            off = m - np.diag(np.diag(m))
            off[3:, :3] = 0.0  # p-rows may carry entries in t/x columns
            assert np.all(off == 0.0)


class TestPairing:
    def test_same_connection_identity_exact(self):
        h, g = metric_pair(2)
        N = canonical_connection(h, g)
        F, C = adapted_frame(N), adapted_coframe(N)
        for q in sampled_points(2, 10, seed=229):
            assert np.array_equal(pairing(F, C, q), np.eye(5))

    def test_randomized_connections_identity(self):
        rng = random.Random(233)
        from jetham.errors import DomainError

        done = 0
        while done < 5:
            n = rng.choice([1, 2, 3])
            N = random_connection(rng, n)
            F, C = adapted_frame(N), adapted_coframe(N)
            try:
                for q in sampled_points(n, 5, seed=239):
                    dev = np.max(np.abs(pairing(F, C, q) - np.eye(2 * n + 1)))
                    assert dev <= 1e-12
            except DomainError:
                continue  # random expressions may leave their domain; redraw
            done += 1

    def test_zero_connection(self):
        F = adapted_frame(zero_connection(2))
        C = adapted_coframe(zero_connection(2))
        assert np.array_equal(pairing(F, C, Q), np.eye(5))

    def test_mismatched_connections_show_difference(self):
        h, g = metric_pair(2)
        N = canonical_connection(h, g)
        N0 = zero_connection(2)
        P = pairing(adapted_frame(N0), adapted_coframe(N), Q)
        # <delta' p_i, delta/delta t> = (N' - N)_i with N = 0 on the frame side
        assert P[3, 0] == pytest.approx(N.evaluate_temporal(Q)[0])
        assert P[4, 0] == pytest.approx(N.evaluate_temporal(Q)[1])
        # spatial block mismatch
        assert P[3, 1] == pytest.approx(N.evaluate_spatial(Q)[0, 0])


class TestTensoriality:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_canonical_pairs_transform_block_diagonally(self, n):
        h, g = metric_pair(n)
        N = canonical_connection(h, g)
        points = sampled_points(n, 15, seed=241)
        for cname, c in charts_for(n).items():
            N_new = canonical_connection(
                transform_time_metric(h, c), transform_space_metric(g, c)
            )
            report = verify_adapted_tensoriality(N, N_new, c, points)
            assert report.passed, (n, cname, report.max_residual)
            assert report.max_residual < 1e-9

    def test_identity_change_trivial(self):
        h, g = metric_pair(2)
        N = canonical_connection(h, g)
        from jetham.charts import identity_change

        report = verify_adapted_tensoriality(
            N, N, identity_change(2), sampled_points(2, 5, seed=251)
        )
        assert report.passed

    def test_violated_connection_raises_precondition(self):
        h, g = metric_pair(2)
        N = canonical_connection(h, g)
        c = nonlinear_charts_for(2)["shear"]
        N_new = canonical_connection(
            transform_time_metric(h, c), transform_space_metric(g, c)
        )
        bad = NonlinearConnection(
            2, (N_new.temporal[0] + 1, N_new.temporal[1]), N_new.spatial
        )
        with pytest.raises(PreconditionError):
            verify_adapted_tensoriality(N, bad, c, sampled_points(2, 5, seed=257))

    def test_violated_connection_mixes_blocks(self):
        h, g = metric_pair(2)
        N = canonical_connection(h, g)
        c = nonlinear_charts_for(2)["shear"]
        N_new = canonical_connection(
            transform_time_metric(h, c), transform_space_metric(g, c)
        )
        bad = NonlinearConnection(
            2, (N_new.temporal[0] + 1, N_new.temporal[1]), N_new.spatial
        )
        report = verify_adapted_tensoriality(
            N, bad, c, sampled_points(2, 5, seed=263), check_precondition=False
        )
        assert not report.passed


class TestDecompose:
    def setup_method(self):
        h, g = metric_pair(2)
        self.N = canonical_connection(h, g)
        self.n = 2

    def test_dt_vector(self):
        v = (ONE, ZERO, ZERO, ZERO, ZERO)
        h_R, h_M, w = decompose(v, self.N)
        assert h_R == ONE and all(e == ZERO for e in h_M)
        # d/dt = delta/delta t + N1_j d/dp_j
        for j in range(self.n):
            assert w[j].eval(Q) == self.N.evaluate_temporal(Q)[j]

    def test_dp_vector(self):
        v = (ZERO, ZERO, ZERO, ONE, ZERO)
        h_R, h_M, w = decompose(v, self.N)
        assert h_R == ZERO and all(e == ZERO for e in h_M)
        assert w[0] == ONE and w[1] == ZERO

    def test_adapted_row_round_trip(self):
        from jetham.frames import adapted_frame

        row = adapted_frame(self.N).rows[1]  # delta/delta x^1
        h_R, h_M, w = decompose(row, self.N)
        assert h_R.eval(Q) == 0.0
        assert [e.eval(Q) for e in h_M] == [1.0, 0.0]
        assert all(e.eval(Q) == 0.0 for e in w)

    def test_reconstruct_inverts_decompose_exactly_on_frame_vectors(self):
        from jetham.frames import adapted_frame

        for row in adapted_frame(self.N).rows:
            h_R, h_M, w = decompose(row, self.N)
            rebuilt = reconstruct(h_R, h_M, w, self.N)
            for got, want in zip(rebuilt, row):
                assert got.eval(Q) == want.eval(Q)

    def test_round_trip_random_fields(self):
        rng = random.Random(269)
        from jetham.errors import DomainError

        done = 0
        while done < 10:
            v = tuple(random_expr(rng, 2, depth=2) for _ in range(5))
            h_R, h_M, w = decompose(v, self.N)
            rebuilt = reconstruct(h_R, h_M, w, self.N)
            try:
                for q in sampled_points(2, 5, seed=271):
                    for got, want in zip(rebuilt, v):
                        scale = max(1.0, abs(want.eval(q)))
                        assert abs(got.eval(q) - want.eval(q)) / scale < 1e-12
            except DomainError:
                continue
            done += 1

    def test_decomposition_coefficients_unique(self):
        # coefficients solve a unit-triangular system; cross-check with numpy
        from jetham.frames import adapted_frame

        rng = random.Random(277)
        v = tuple(random_expr(rng, 2, depth=2) for _ in range(5))
        h_R, h_M, w = decompose(v, self.N)
        F = adapted_frame(self.N).evaluate(Q)
        vals = np.array([e.eval(Q) for e in v])
        coeffs = np.linalg.solve(F.T, vals)
        got = np.array([h_R.eval(Q), *[e.eval(Q) for e in h_M], *[e.eval(Q) for e in w]])
        assert got == pytest.approx(coeffs, rel=1e-12, abs=1e-12)
