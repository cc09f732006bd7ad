"""Adapted frame and coframe of a nonlinear connection.

The adapted frame replaces d/dt and d/dx^i by their horizontal lifts
(delta/delta t, delta/delta x^i); the adapted coframe replaces dp_i by
delta p_i.  Vector and covector fields are handled extensionally, as
component arrays over the natural frame, so every claim about the frames
(duality, unit triangularity, purely tensorial transformation, three-way
horizontal/vertical splitting) reduces to finite linear algebra at a point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .charts import (
    CoordChange,
    induced_point,
    natural_coframe_matrix,
    natural_frame_matrix,
    transition,
)
from .errors import DimensionError, PreconditionError
from .expr import Expr, Point, const, esum
from .nlconn import NonlinearConnection, verify_connection_law
from .report import CheckRecord, Report

__all__ = [
    "AdaptedFrame",
    "AdaptedCoframe",
    "adapted_frame",
    "adapted_coframe",
    "pairing",
    "verify_adapted_tensoriality",
    "decompose",
    "reconstruct",
]

_ZERO = const(0)
_ONE = const(1)


def _eval_matrix(rows: tuple[tuple[Expr, ...], ...], q: Point) -> np.ndarray:
    return np.array([[e.eval(q) for e in row] for row in rows])


@dataclass(frozen=True)
class AdaptedFrame:
    """rows[a][b]: natural-frame component b of adapted vector a, vectors
    ordered (delta/delta t, delta/delta x^i, d/dp_i) over columns
    (d/dt, d/dx^i, d/dp_i).  Unit triangular with determinant 1: the only
    off-diagonal entries are the connection components in the p-columns."""

    n: int
    rows: tuple[tuple[Expr, ...], ...]

    def evaluate(self, q: Point) -> np.ndarray:
        return _eval_matrix(self.rows, q)


@dataclass(frozen=True)
class AdaptedCoframe:
    """rows[a][b]: natural-coframe component b of adapted covector a,
    covectors ordered (dt, dx^i, delta p_i); the connection components sit
    in the t/x-columns of the delta p_i rows."""

    n: int
    rows: tuple[tuple[Expr, ...], ...]

    def evaluate(self, q: Point) -> np.ndarray:
        return _eval_matrix(self.rows, q)


def adapted_frame(N: NonlinearConnection) -> AdaptedFrame:
    """delta/delta t = d/dt - N_(j)1 d/dp_j;
    delta/delta x^i = d/dx^i - N_(j)i d/dp_j."""
    n = N.n
    size = 2 * n + 1
    rows: list[list[Expr]] = [[_ZERO] * size for _ in range(size)]
    rows[0][0] = _ONE
    for j in range(n):
        rows[0][n + 1 + j] = -N.temporal[j]
    for i in range(n):
        rows[1 + i][1 + i] = _ONE
        for j in range(n):
            rows[1 + i][n + 1 + j] = -N.spatial[j][i]
    for i in range(n):
        rows[n + 1 + i][n + 1 + i] = _ONE
    return AdaptedFrame(n, tuple(tuple(r) for r in rows))


def adapted_coframe(N: NonlinearConnection) -> AdaptedCoframe:
    """delta p_i = dp_i + N_(i)1 dt + N_(i)j dx^j."""
    n = N.n
    size = 2 * n + 1
    rows: list[list[Expr]] = [[_ZERO] * size for _ in range(size)]
    rows[0][0] = _ONE
    for i in range(n):
        rows[1 + i][1 + i] = _ONE
    for i in range(n):
        row = rows[n + 1 + i]
        row[0] = N.temporal[i]
        for j in range(n):
            row[1 + j] = N.spatial[i][j]
        row[n + 1 + i] = _ONE
    return AdaptedCoframe(n, tuple(tuple(r) for r in rows))


def pairing(F: AdaptedFrame, C: AdaptedCoframe, q: Point) -> np.ndarray:
    """Matrix of <covector a, vector b> values at q; the identity exactly
    when F and C come from the same connection."""
    if F.n != C.n:
        raise DimensionError("frame and coframe dimensions differ")
    return C.evaluate(q) @ F.evaluate(q).T


def verify_adapted_tensoriality(
    N_old: NonlinearConnection,
    N_new: NonlinearConnection,
    c: CoordChange,
    points: Sequence[Point],
    tol: float = 1e-9,
    check_precondition: bool = True,
) -> Report:
    """Check that adapted frames of a law-satisfying connection pair
    transform block-diagonally with the tensorial factors:

        delta/delta t   -> (dt~/dt) delta/delta t~
        delta/delta x^i -> (dx~^j/dx^i) delta/delta x~^j
        d/dp_i          -> (dt~/dt)(dx^i/dx~^j) d/dp~_j
        dt              -> (dt/dt~) dt~
        dx^i            -> (dx^i/dx~^j) dx~^j
        delta p_i       -> (dt/dt~)(dx~^j/dx^i) delta p~_j

    Residuals cover both the diagonal-block factors and all off-block
    mixing (which must vanish).  Set check_precondition=False to run the
    comparison on a pair that violates the connection law (negative
    controls); by default such a pair raises PreconditionError.
    """
    if check_precondition:
        law = verify_connection_law(N_old, N_new, c, points, tol)
        if not law.passed:
            raise PreconditionError(
                f"connection pair violates its transformation law "
                f"(max residual {law.max_residual:.3e}); adapted-frame "
                "tensoriality is only claimed for law-satisfying pairs"
            )

    n = c.n
    F_old = adapted_frame(N_old)
    C_old = adapted_coframe(N_old)
    F_new = adapted_frame(N_new)
    C_new = adapted_coframe(N_new)

    records = []
    for q in points:
        td = transition(c, q)
        image = induced_point(c, q)
        td_inv = transition(c.inverse(), image)
        A = natural_frame_matrix(td)
        B = natural_coframe_matrix(td, td_inv)
        Fn = F_new.evaluate(image)
        Cn = C_new.evaluate(image)

        # old adapted vectors, re-expressed in the new adapted frame
        got_frame = np.linalg.solve(Fn.T, (F_old.evaluate(q) @ A).T).T
        want_frame = np.zeros_like(got_frame)
        want_frame[0, 0] = td.dt_tilde_dt
        want_frame[1 : n + 1, 1 : n + 1] = td.jac.T
        want_frame[n + 1 :, n + 1 :] = td.dt_tilde_dt * td.jac_inv
        worst = float(np.max(np.abs(got_frame - want_frame)))
        records.append(
            CheckRecord("frames.frame_tensoriality", "", q.flat(), worst, worst <= tol)
        )

        # old adapted covectors, re-expressed in the new adapted coframe
        got_co = np.linalg.solve(Cn.T, (C_old.evaluate(q) @ B).T).T
        want_co = np.zeros_like(got_co)
        want_co[0, 0] = td.dt_dt_tilde
        want_co[1 : n + 1, 1 : n + 1] = td.jac_inv
        want_co[n + 1 :, n + 1 :] = td.dt_dt_tilde * td.jac.T
        worst = float(np.max(np.abs(got_co - want_co)))
        records.append(
            CheckRecord("frames.coframe_tensoriality", "", q.flat(), worst, worst <= tol)
        )
    return Report.of(records)


def decompose(
    v: Sequence[Expr], N: NonlinearConnection
) -> tuple[Expr, tuple[Expr, ...], tuple[Expr, ...]]:
    """Unique coefficients of a vector field over the adapted frame.

    v holds 2n+1 natural-frame components (t, x, p blocks); the result
    (h_R, h_M, w) satisfies v = h_R delta/delta t + h_M^i delta/delta x^i
    + w_j d/dp_j.  The frame is unit triangular, so this is a one-pass
    substitution, exact at the expression level.
    """
    n = N.n
    if len(v) != 2 * n + 1:
        raise DimensionError(f"vector field needs {2 * n + 1} components")
    h_R = v[0]
    h_M = tuple(v[1 + i] for i in range(n))
    w = tuple(
        v[n + 1 + j]
        + h_R * N.temporal[j]
        + esum(h_M[i] * N.spatial[j][i] for i in range(n))
        for j in range(n)
    )
    return h_R, h_M, w


def reconstruct(
    h_R: Expr, h_M: Sequence[Expr], w: Sequence[Expr], N: NonlinearConnection
) -> tuple[Expr, ...]:
    """Natural-frame components of h_R delta/delta t + h_M^i delta/delta x^i
    + w_j d/dp_j (the inverse of decompose)."""
    n = N.n
    p_comps = tuple(
        w[j]
        - h_R * N.temporal[j]
        - esum(h_M[i] * N.spatial[j][i] for i in range(n))
        for j in range(n)
    )
    return (h_R, *h_M, *p_comps)
