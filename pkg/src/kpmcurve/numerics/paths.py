"""Parametrized paths in the complex lambda-plane.

Every segment maps ``t`` in [0, 1] to a point of the plane.  ``coord`` tells
how that point relates to lambda: ``"lambda"`` means the point *is* lambda,
``"inverse"`` means the point is ``w = 1/lambda`` (used for rays ending at
lambda = infinity).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .precision import STANDARD, Precision


@dataclass(frozen=True)
class LineSegment:
    z0: complex
    z1: complex
    sheet_anchor: complex | None = None
    coord: str = "lambda"

    def w(self, t, prec: Precision = STANDARD):
        return self.z0 + t * (self.z1 - self.z0)

    def dw(self, t, prec: Precision = STANDARD):
        return (self.z1 - self.z0) + 0 * t

    def reversed(self):
        return LineSegment(self.z1, self.z0, None, self.coord)

    def conjugate(self):
        return LineSegment(self.z0.conjugate(), self.z1.conjugate(), None, self.coord)

    def length(self) -> float:
        return abs(complex(self.z1) - complex(self.z0))

    # lambda-plane view
    def point(self, t, prec: Precision = STANDARD):
        w = self.w(t, prec)
        return w if self.coord == "lambda" else 1 / w

    def deriv(self, t, prec: Precision = STANDARD):
        if self.coord == "lambda":
            return self.dw(t, prec)
        w = self.w(t, prec)
        return -self.dw(t, prec) / (w * w)

    def with_anchor(self, mu):
        return replace(self, sheet_anchor=mu)


@dataclass(frozen=True)
class ArcSegment:
    """``center + radius * exp(i theta)`` for theta from ``theta0`` to ``theta1``."""

    center: complex
    radius: float
    theta0: float
    theta1: float
    sheet_anchor: complex | None = None
    coord: str = "lambda"

    # angles go through units of pi so that junctions at multiples of pi/2
    # are exact in every precision
    def _turns(self, t):
        a0 = self.theta0 / math.pi
        return a0 + t * (self.theta1 / math.pi - a0)

    def w(self, t, prec: Precision = STANDARD):
        return self.center + self.radius * prec.cispi(self._turns(t))

    def dw(self, t, prec: Precision = STANDARD):
        d = self.theta1 / math.pi - self.theta0 / math.pi
        return 1j * (d * prec.pi) * self.radius * prec.cispi(self._turns(t))

    @property
    def z0(self):
        return complex(self.w(0.0))

    @property
    def z1(self):
        return complex(self.w(1.0))

    def reversed(self):
        return ArcSegment(self.center, self.radius, self.theta1, self.theta0, None, self.coord)

    def conjugate(self):
        c = complex(self.center).conjugate()
        return ArcSegment(c, self.radius, -self.theta0, -self.theta1, None, self.coord)

    def length(self) -> float:
        return abs(self.theta1 - self.theta0) * self.radius

    point = LineSegment.point
    deriv = LineSegment.deriv
    with_anchor = LineSegment.with_anchor


PathSegment = LineSegment | ArcSegment


def circle(center: complex, radius: float, start_angle: float = math.pi, pieces: int = 4,
           clockwise: bool = False):
    """A full circle split into ``pieces`` arcs, starting at ``start_angle``."""
    sign = -1.0 if clockwise else 1.0
    step = sign * 2 * math.pi / pieces
    return [ArcSegment(center, radius, start_angle + k * step, start_angle + (k + 1) * step)
            for k in range(pieces)]


def sample(seg: PathSegment, n: int):
    """``n + 1`` equally spaced lambda-points along a segment (double precision)."""
    return [complex(seg.point(k / n)) for k in range(n + 1)]
