"""Distinguished tensor fields and their multilinear transformation law.

A d-tensor carries a signature of six possible index kinds.  Time indices
range over the single value 1 and contribute a scaling factor but no array
axis; space and momentum indices contribute an axis of size n.  A momentum
index is a composite "double index" whose factor is the product of a
spatial Jacobian factor and a time factor -- the same combination the
induced momentum change itself uses, which is what makes the momenta
coordinates a d-tensor field (the Liouville-Hamilton tensor below).

Components transform multilinearly with one factor per slot and no
inhomogeneous terms; semisprays and nonlinear connections fail exactly
this law, which the negative-control tests exercise.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .charts import CoordChange, TransitionData, induced_point, transition
from .errors import SignatureMismatchError
from .expr import Expr, Point, Var, const, pvar
from .metrics import SpaceMetric, TimeMetric, inverse_space, inverse_time
from .report import CheckRecord, Report, residual

__all__ = [
    "IndexKind",
    "DTensor",
    "Hamiltonian",
    "transform_factor",
    "push_forward",
    "verify_dtensor",
    "vertical_metrical",
    "liouville",
    "momentum_liouville",
    "h_normalization",
    "metric_hamiltonian",
]


class IndexKind(Enum):
    TIME_UP = "time_up"
    TIME_DOWN = "time_down"
    SPACE_UP = "space_up"
    SPACE_DOWN = "space_down"
    MOM_UP = "mom_up"
    MOM_DOWN = "mom_down"

    @property
    def has_axis(self) -> bool:
        return self not in (IndexKind.TIME_UP, IndexKind.TIME_DOWN)


@dataclass(frozen=True, eq=False)
class DTensor:
    """Index-signature-tagged array of expression components.

    comps has one axis of length n per space/momentum slot, in signature
    order; time slots are recorded in the signature only.
    """

    n: int
    signature: tuple[IndexKind, ...]
    comps: np.ndarray  # object array of Expr

    def __post_init__(self):
        rank = sum(1 for k in self.signature if k.has_axis)
        comps = np.asarray(self.comps, dtype=object)
        object.__setattr__(self, "comps", comps)
        if comps.ndim != rank or any(s != self.n for s in comps.shape):
            raise SignatureMismatchError(
                f"components of shape {comps.shape} do not match signature {self.signature}"
            )

    def evaluate(self, q: Point) -> np.ndarray:
        flat = [e.eval(q) for e in self.comps.ravel()]
        return np.array(flat, dtype=float).reshape(self.comps.shape)


@dataclass(frozen=True)
class Hamiltonian:
    """A scalar function of (t, x, p) on the phase space of momenta."""

    n: int
    expr: Expr


def transform_factor(kind: IndexKind, td: TransitionData):
    """New-frame-in-terms-of-old factor for one index slot: a scalar for
    time kinds, an (new, old) matrix for space/momentum kinds."""
    if kind is IndexKind.TIME_UP:
        return td.dt_tilde_dt
    if kind is IndexKind.TIME_DOWN:
        return td.dt_dt_tilde
    if kind is IndexKind.SPACE_UP:
        return td.jac
    if kind is IndexKind.SPACE_DOWN:
        return td.jac_inv.T
    if kind is IndexKind.MOM_UP:
        return td.jac * td.dt_dt_tilde
    return td.jac_inv.T * td.dt_tilde_dt  # MOM_DOWN


def push_forward(T: DTensor, c: CoordChange, q: Point) -> np.ndarray:
    """Numeric components of T in the tilde frame at the image of q."""
    td = transition(c, q)
    values = T.evaluate(q)
    axis = 0
    for kind in T.signature:
        factor = transform_factor(kind, td)
        if kind.has_axis:
            values = np.moveaxis(np.tensordot(factor, values, axes=(1, axis)), 0, axis)
            axis += 1
        else:
            values = values * factor
    return values


def verify_dtensor(
    T_old: DTensor,
    T_new: DTensor,
    c: CoordChange,
    points: Sequence[Point],
    tol: float = 1e-9,
    check_id: str = "dtensor",
) -> Report:
    """Compare the pushed-forward old components against the new-chart
    components at each image point, and back again through the inverse
    change (the law read old-in-terms-of-new contracts with the inverse
    factors, so both readings are exercised)."""
    if T_old.signature != T_new.signature or T_old.n != T_new.n:
        raise SignatureMismatchError(
            f"signatures differ: {T_old.signature} vs {T_new.signature}"
        )
    inverse = c.inverse()
    records = []
    for q in points:
        image = induced_point(c, q)
        pushed = push_forward(T_old, c, q)
        expected = T_new.evaluate(image)
        worst = 0.0
        for got, want in zip(pushed.ravel(), expected.ravel()):
            worst = max(worst, residual(float(got), float(want)))
        pulled = push_forward(T_new, inverse, image)
        back = T_old.evaluate(q)
        for got, want in zip(pulled.ravel(), back.ravel()):
            worst = max(worst, residual(float(got), float(want)))
        records.append(
            CheckRecord(check_id, "", q.flat(), worst, worst <= tol)
        )
    return Report.of(records)


# ---------------------------------------------------------------------------
# The built-in d-tensor fields
# ---------------------------------------------------------------------------

def vertical_metrical(H: Hamiltonian) -> DTensor:
    """Half the p-Hessian of a Hamiltonian: signature [MOM_UP, MOM_UP]."""
    n = H.n
    comps = np.empty((n, n), dtype=object)
    half = const(0.5)
    for i in range(n):
        di = H.expr.diff(Var.momentum(i))
        for j in range(i, n):
            entry = half * di.diff(Var.momentum(j))
            comps[i, j] = entry
            comps[j, i] = entry
    return DTensor(n, (IndexKind.MOM_UP, IndexKind.MOM_UP), comps)


def liouville(n: int) -> DTensor:
    """The momenta coordinates themselves: signature [MOM_DOWN]."""
    comps = np.array([pvar(i) for i in range(n)], dtype=object)
    return DTensor(n, (IndexKind.MOM_DOWN,), comps)


def momentum_liouville(h: TimeMetric, n: int) -> DTensor:
    """h_11 p_j: signature [MOM_DOWN, TIME_DOWN, TIME_DOWN]."""
    comps = np.array([h.h11 * pvar(j) for j in range(n)], dtype=object)
    return DTensor(
        n, (IndexKind.MOM_DOWN, IndexKind.TIME_DOWN, IndexKind.TIME_DOWN), comps
    )


def h_normalization(h: TimeMetric, n: int) -> DTensor:
    """h_11 delta^i_j: signature [MOM_UP, TIME_DOWN, SPACE_DOWN]."""
    zero = const(0)
    comps = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            comps[i, j] = h.h11 if i == j else zero
    return DTensor(
        n, (IndexKind.MOM_UP, IndexKind.TIME_DOWN, IndexKind.SPACE_DOWN), comps
    )


def metric_hamiltonian(h: TimeMetric, g: SpaceMetric) -> Hamiltonian:
    """The kinetic-energy Hamiltonian h^11 g^ij p_i p_j of a metric pair."""
    n = g.n
    hinv = inverse_time(h)
    ginv = inverse_space(g)
    total = const(0)
    for i in range(n):
        for j in range(n):
            total = total + hinv * ginv[i][j] * pvar(i) * pvar(j)
    return Hamiltonian(n, total)
