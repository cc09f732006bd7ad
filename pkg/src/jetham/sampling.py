"""Seeded, boxed sampling of phase-space points.

Sampling boxes keep every evaluation away from singular loci (t = 0 for
t^2-style reparametrizations, x = 0 for polar-style metrics); singularity
avoidance is configuration, never silent skipping.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .errors import DimensionError
from .expr import Point

__all__ = ["Box", "sample_points", "DEFAULT_T_RANGE", "DEFAULT_X_RANGE", "DEFAULT_P_RANGE"]

DEFAULT_T_RANGE = (0.5, 2.0)
DEFAULT_X_RANGE = (0.5, 2.0)
DEFAULT_P_RANGE = (-3.0, 3.0)


@dataclass(frozen=True)
class Box:
    """Per-variable sampling intervals for (t, x^i, p_i)."""

    n: int
    t: tuple[float, float] = DEFAULT_T_RANGE
    x: tuple[tuple[float, float], ...] = field(default=())
    p: tuple[tuple[float, float], ...] = field(default=())

    def __post_init__(self):
        if not self.x:
            object.__setattr__(self, "x", (DEFAULT_X_RANGE,) * self.n)
        if not self.p:
            object.__setattr__(self, "p", (DEFAULT_P_RANGE,) * self.n)
        if len(self.x) != self.n or len(self.p) != self.n:
            raise DimensionError("box needs one interval per coordinate")
        for lo, hi in (self.t, *self.x, *self.p):
            if not lo < hi:
                raise DimensionError(f"empty interval [{lo}, {hi}]")


def sample_points(box: Box, count: int, seed: int) -> list[Point]:
    """Deterministic uniform samples; identical (box, count, seed) give
    identical points on every platform."""
    rng = random.Random(seed)
    points = []
    for _ in range(count):
        t = rng.uniform(*box.t)
        x = tuple(rng.uniform(lo, hi) for lo, hi in box.x)
        p = tuple(rng.uniform(lo, hi) for lo, hi in box.p)
        points.append(Point(t, x, p))
    return points
