"""Temporal and spatial semisprays of momenta.

Semisprays are component families G_(j)i(t, x, p) that are tensors on the
phase space but NOT d-tensors: their transformation laws pick up an
inhomogeneous term built from the derivatives of the induced momentum
change (dp~/dt for the temporal family, dp~/dx for the spatial one).
The canonical families come from the metric pair: the temporal one from
the time Christoffel symbol, the spatial one from the Levi-Civita symbols.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .charts import CoordChange, induced_point, transition
from .errors import DimensionError
from .expr import Expr, Point, const, esum, pvar
from .metrics import SpaceMetric, TimeMetric, christoffel_space, christoffel_time
from .report import CheckRecord, Report, residual

__all__ = [
    "TemporalSemispray",
    "SpatialSemispray",
    "MomentumSemispray",
    "canonical_temporal",
    "canonical_spatial",
    "verify_temporal_law",
    "verify_spatial_law",
]


@dataclass(frozen=True)
class TemporalSemispray:
    """coeffs[j][k] = G_(j)k(t, x, p) of the temporal family."""

    n: int
    coeffs: tuple[tuple[Expr, ...], ...]

    def __post_init__(self):
        if len(self.coeffs) != self.n or any(len(r) != self.n for r in self.coeffs):
            raise DimensionError(f"temporal semispray must be {self.n}x{self.n}")

    def evaluate(self, q: Point) -> np.ndarray:
        return np.array([[e.eval(q) for e in row] for row in self.coeffs])


@dataclass(frozen=True)
class SpatialSemispray:
    """coeffs[j][i] = G_(j)i(t, x, p) of the spatial family."""

    n: int
    coeffs: tuple[tuple[Expr, ...], ...]

    def __post_init__(self):
        if len(self.coeffs) != self.n or any(len(r) != self.n for r in self.coeffs):
            raise DimensionError(f"spatial semispray must be {self.n}x{self.n}")

    def evaluate(self, q: Point) -> np.ndarray:
        return np.array([[e.eval(q) for e in row] for row in self.coeffs])


@dataclass(frozen=True)
class MomentumSemispray:
    """A temporal and a spatial semispray over the same ambient dimension."""

    temporal: TemporalSemispray
    spatial: SpatialSemispray

    def __post_init__(self):
        if self.temporal.n != self.spatial.n:
            raise DimensionError("temporal and spatial parts have different n")

    @property
    def n(self) -> int:
        return self.temporal.n


def canonical_temporal(h: TimeMetric, n: int) -> TemporalSemispray:
    """G_(j)k = (1/2) H_11^1 p_j p_k, quadratic in the momenta."""
    H = christoffel_time(h).H111
    half = const(0.5)
    rows: list[list[Expr]] = [[None] * n for _ in range(n)]  # type: ignore[list-item]
    for j in range(n):
        for k in range(j, n):
            entry = half * H * pvar(j) * pvar(k)
            rows[j][k] = entry
            rows[k][j] = entry
    return TemporalSemispray(n, tuple(tuple(r) for r in rows))


def canonical_spatial(g: SpaceMetric) -> SpatialSemispray:
    """G_(j)k = -(1/2) gamma^i_jk p_i, linear in the momenta."""
    gamma = christoffel_space(g).gamma
    n = g.n
    half = const(0.5)
    rows: list[list[Expr]] = [[None] * n for _ in range(n)]  # type: ignore[list-item]
    for j in range(n):
        for k in range(j, n):
            entry = -(half * esum(gamma[i][j][k] * pvar(i) for i in range(n)))
            rows[j][k] = entry
            rows[k][j] = entry
    return SpatialSemispray(n, tuple(tuple(r) for r in rows))


def _verify_semispray_law(
    old_eval,
    new_eval,
    inhomogeneous,
    c: CoordChange,
    points: Sequence[Point],
    tol: float,
    check_id: str,
) -> Report:
    n = c.n
    records = []
    for q in points:
        td = transition(c, q)
        image = induced_point(c, q)
        old = old_eval(q)
        new = new_eval(image)
        inhom = inhomogeneous(td, q)
        worst = 0.0
        for k in range(n):
            for r in range(n):
                homogeneous = 2.0 * float(
                    td.dt_tilde_dt * (td.jac_inv[:, k] @ old @ td.jac_inv[:, r])
                )
                lhs = 2.0 * float(new[k, r])
                rhs = homogeneous - float(inhom[k, r])
                worst = max(worst, residual(lhs, rhs))
        records.append(CheckRecord(check_id, "", q.flat(), worst, worst <= tol))
    return Report.of(records)


def verify_temporal_law(
    G_old: TemporalSemispray,
    G_new: TemporalSemispray,
    c: CoordChange,
    points: Sequence[Point],
    tol: float = 1e-9,
) -> Report:
    """Both sides of the temporal law at each point:

        2 G~_(k)r = 2 G_(j)i (dt~/dt)(dx^i/dx~^r)(dx^j/dx~^k)
                    - (dx^i/dx~^r)(dp~_k/dt) p_i
    """
    if G_old.n != c.n or G_new.n != c.n:
        raise DimensionError("semispray and change dimensions differ")

    def inhom(td, q):
        p = np.array(q.p)
        # [k][r] = (dx^i/dx~^r) (dp~_k/dt) p_i
        return np.outer(td.dp_tilde_dt, td.jac_inv.T @ p)

    return _verify_semispray_law(
        G_old.evaluate, G_new.evaluate, inhom, c, points, tol, "spray.temporal"
    )


def verify_spatial_law(
    G_old: SpatialSemispray,
    G_new: SpatialSemispray,
    c: CoordChange,
    points: Sequence[Point],
    tol: float = 1e-9,
) -> Report:
    """Both sides of the spatial law at each point:

        2 G~_(s)k = 2 G_(j)i (dt~/dt)(dx^i/dx~^k)(dx^j/dx~^s)
                    - (dx^i/dx~^k)(dp~_s/dx^i)
    """
    if G_old.n != c.n or G_new.n != c.n:
        raise DimensionError("semispray and change dimensions differ")

    def inhom(td, q):
        # [s][k] = (dx^i/dx~^k)(dp~_s/dx^i)
        return td.dp_tilde_dx @ td.jac_inv

    return _verify_semispray_law(
        G_old.evaluate, G_new.evaluate, inhom, c, points, tol, "spray.spatial"
    )
