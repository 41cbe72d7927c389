"""Truncated Taylor jets in (x, y, t).

A :class:`Jet3` stores the Taylor coefficients ``c[a, b, c]`` of a field
around a base point, ``f(x0 + dx, ...) = sum c[a,b,c] dx**a dy**b dt**c``,
for ``a <= nx, b <= ny, c <= nt``.  Box truncation is closed under
products, so every operation below is exact up to the stated orders.
Trailing array axes are batch axes: one Jet3 can carry many base points.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial

import numpy as np


@dataclass(frozen=True)
class Jet3:
    coeffs: np.ndarray

    def __post_init__(self):
        if self.coeffs.ndim < 3:
            raise ValueError("Jet3 coefficients need at least three axes")

    @property
    def orders(self) -> tuple[int, int, int]:
        s = self.coeffs.shape
        return (s[0] - 1, s[1] - 1, s[2] - 1)

    @property
    def constant(self):
        return self.coeffs[0, 0, 0]

    @classmethod
    def constant_jet(cls, value, orders, batch=()):
        c = np.zeros(tuple(o + 1 for o in orders) + tuple(batch), dtype=complex)
        c[0, 0, 0] = value
        return cls(c)

    @classmethod
    def affine(cls, value, grad, orders):
        """Jet of ``value + gx*dx + gy*dy + gt*dt``."""
        j = cls.constant_jet(value, orders, np.shape(value))
        for axis, g in enumerate(grad):
            if orders[axis] >= 1:
                idx = [0, 0, 0]
                idx[axis] = 1
                j.coeffs[tuple(idx)] = g
        return j

    def __add__(self, other):
        if isinstance(other, Jet3):
            return Jet3(self.coeffs + other.coeffs)
        c = self.coeffs.copy()
        c[0, 0, 0] += other
        return Jet3(c)

    __radd__ = __add__

    def __neg__(self):
        return Jet3(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Jet3):
            return jet_mul(self, other)
        return Jet3(self.coeffs * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet3):
            return jet_mul(self, jet_reciprocal(other))
        return Jet3(self.coeffs / other)

    def derivative_value(self, a: int, b: int, c: int):
        """The partial derivative d^a_x d^b_y d^c_t at the base point."""
        return self.coeffs[a, b, c] * (factorial(a) * factorial(b) * factorial(c))


def jet_mul(f: Jet3, g: Jet3) -> Jet3:
    nx, ny, nt = f.orders
    if g.orders != (nx, ny, nt):
        raise ValueError("jet orders differ")
    fc, gc = f.coeffs, g.coeffs
    out = np.zeros(np.broadcast_shapes(fc.shape, gc.shape), dtype=complex)
    for a in range(nx + 1):
        for b in range(ny + 1):
            for c in range(nt + 1):
                out[a:, b:, c:] += fc[a, b, c] * gc[: nx + 1 - a, : ny + 1 - b, : nt + 1 - c]
    return Jet3(out)


def _nilpotency(j: Jet3) -> int:
    return sum(j.orders)


def _series(h: Jet3, coeffs) -> Jet3:
    """``sum coeffs[m] h**m`` for a jet with zero constant term (Horner)."""
    acc = Jet3.constant_jet(coeffs[-1], h.orders, h.coeffs.shape[3:])
    for c in reversed(coeffs[:-1]):
        acc = acc * h + c
    return acc


def jet_exp(j: Jet3) -> Jet3:
    c0 = j.constant
    h = j - c0
    n = _nilpotency(j)
    series = _series(h, [1.0 / factorial(m) for m in range(n + 1)])
    return series * np.exp(c0)


def jet_log(j: Jet3) -> Jet3:
    c0 = j.constant
    if np.any(c0 == 0):
        raise ZeroDivisionError("jet_log: constant term vanishes")
    h = j / c0 - 1.0
    n = _nilpotency(j)
    coeffs = [0.0] + [(-1.0) ** (m + 1) / m for m in range(1, n + 1)]
    return _series(h, coeffs) + np.log(c0)


def jet_reciprocal(j: Jet3) -> Jet3:
    c0 = j.constant
    if np.any(c0 == 0):
        raise ZeroDivisionError("jet_reciprocal: constant term vanishes")
    h = j / c0 - 1.0
    n = _nilpotency(j)
    return _series(h, [(-1.0) ** m for m in range(n + 1)]) / c0


def jet_derivative(j: Jet3, axis: int) -> Jet3:
    """Jet of the partial derivative along ``axis``; that order drops by one."""
    if j.orders[axis] == 0:
        raise ValueError("cannot differentiate a jet of order 0 along this axis")
    c = np.moveaxis(j.coeffs, axis, 0)
    k = np.arange(1, c.shape[0]).reshape((-1,) + (1,) * (c.ndim - 1))
    d = c[1:] * k
    return Jet3(np.moveaxis(d, 0, axis))


def jet_truncate(j: Jet3, orders) -> Jet3:
    return Jet3(j.coeffs[: orders[0] + 1, : orders[1] + 1, : orders[2] + 1].copy())
