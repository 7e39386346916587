"""Vandermonde-type matrices: a diagonal scaling by h(t_i) times a Vandermonde block."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..algebra.poly import UniPoly
from .matrix import ExactMatrix


class VandermondeError(ValueError):
    pass


@dataclass(frozen=True)
class VandermondeSpec:
    h: UniPoly
    points: tuple
    m: int
    order: int

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if self.order not in (0, 1):
            raise VandermondeError("order must be 0 or 1")
        if self.m < 1:
            raise VandermondeError("width parameter m must be at least 1")
        if len(set(self.points)) != len(self.points):
            raise VandermondeError("points must be pairwise distinct")


def vandermonde_rows(h: UniPoly, points: Sequence, m: int, order: int) -> list[list]:
    """Rows ``h(t) * (t^m, ..., t^lo)`` with ``lo = 1 - order``.

    Uses only ring operations, so symbolic points work as well.
    """
    lo = 1 - order
    rows = []
    for t in points:
        s = h(t)
        rows.append([s * t**k for k in range(m, lo - 1, -1)])
    return rows


def vandermonde_type(spec: VandermondeSpec, field=None) -> ExactMatrix:
    F = field or spec.h.field
    h = spec.h if spec.h.field == F else spec.h.with_field(F)
    pts = [F(t) for t in spec.points]
    if len(set(pts)) != len(pts):
        raise VandermondeError("points collide in the scalar context")
    width = spec.m if spec.order == 0 else spec.m + 1
    return ExactMatrix(tuple(map(tuple, vandermonde_rows(h, pts, spec.m, spec.order))), width, F)


def V0(h: UniPoly, points: Sequence, m: int) -> ExactMatrix:
    return vandermonde_type(VandermondeSpec(h, tuple(points), m, 0))


def V1(h: UniPoly, points: Sequence, m: int) -> ExactMatrix:
    return vandermonde_type(VandermondeSpec(h, tuple(points), m, 1))
