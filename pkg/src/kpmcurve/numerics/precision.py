"""Working-precision modes.

Two modes are supported.  ``standard`` runs on Python ``complex`` scalars
(IEEE double, about 16 significant digits) with numpy for the dense linear
algebra.  ``extended`` runs on a private mpmath context at 32 significant
digits.  Arithmetic operators are shared, so code written against a
:class:`Precision` object works unchanged in both modes; only the handful of
transcendental and linear-algebra helpers below dispatch.
"""
from __future__ import annotations

import cmath
import math
from functools import lru_cache

import mpmath
import numpy as np


class Precision:
    """Base class; use :data:`STANDARD` or :data:`EXTENDED`."""

    name: str = ""
    digits: int = 0
    eps: float = 0.0

    def scalar(self, x):
        raise NotImplementedError

    def real(self, x):
        raise NotImplementedError

    @property
    def pi(self):
        raise NotImplementedError

    def to_complex(self, x) -> complex:
        return complex(x)

    def __repr__(self) -> str:
        return f"Precision({self.name!r})"

    def __reduce__(self):
        return (get_precision, (self.name,))


class _Standard(Precision):
    name = "standard"
    digits = 16
    eps = 2.0**-52

    def scalar(self, x):
        return complex(x)

    def real(self, x):
        return float(x.real if isinstance(x, complex) else x)

    @property
    def pi(self):
        return math.pi

    sqrt = staticmethod(cmath.sqrt)
    exp = staticmethod(cmath.exp)
    log = staticmethod(cmath.log)

    def cis(self, theta):
        return cmath.exp(1j * theta)

    def cispi(self, x):
        """exp(i pi x); exact at integer and half-integer x."""
        x = float(x)
        if (2 * x).is_integer():
            return (1, 1j, -1, -1j)[int(2 * x) % 4] + 0j
        return cmath.exp(1j * math.pi * x)

    def solve(self, a, b):
        """Solve ``a x = b`` for a square matrix and a vector or matrix ``b``."""
        x = np.linalg.solve(np.array(a, dtype=complex), np.array(b, dtype=complex))
        return x.tolist()

    def fmt(self, x) -> str:
        return repr(float(x))


class _Extended(Precision):
    name = "extended"
    digits = 32

    def __init__(self):
        self.ctx = mpmath.MPContext()
        self.ctx.dps = self.digits
        self.eps = float(self.ctx.eps)

    def scalar(self, x):
        return self.ctx.mpc(x)

    def real(self, x):
        return self.ctx.re(x) if isinstance(x, self.ctx.mpc) else self.ctx.mpf(x)

    @property
    def pi(self):
        return self.ctx.pi

    def sqrt(self, x):
        return self.ctx.sqrt(self.ctx.mpc(x))

    def exp(self, x):
        return self.ctx.exp(x)

    def log(self, x):
        return self.ctx.log(self.ctx.mpc(x))

    def cis(self, theta):
        return self.ctx.expjpi(self.ctx.mpf(theta) / self.ctx.pi)

    def cispi(self, x):
        return self.ctx.expjpi(x)

    def solve(self, a, b):
        ctx = self.ctx
        am = ctx.matrix(a)
        bm = ctx.matrix(b)
        if bm.cols == 1:
            x = ctx.lu_solve(am, bm)
            return [x[i] for i in range(x.rows)]
        cols = [ctx.lu_solve(am, bm.column(j)) for j in range(bm.cols)]
        return [[cols[j][i] for j in range(bm.cols)] for i in range(am.rows)]

    def fmt(self, x) -> str:
        return self.ctx.nstr(self.ctx.mpf(x), self.digits + 2, strip_zeros=False)


STANDARD = _Standard()
EXTENDED = _Extended()
MODES = ("standard", "extended")


def get_precision(mode) -> Precision:
    if isinstance(mode, Precision):
        return mode
    if mode == "standard":
        return STANDARD
    if mode == "extended":
        return EXTENDED
    raise ValueError(f"unknown precision mode {mode!r}; expected 'standard' or 'extended'")


@lru_cache(maxsize=None)
def gauss_legendre(order: int, mode: str = "standard"):
    """Nodes and weights of the ``order``-point Gauss-Legendre rule on [0, 1].

    The extended nodes are the double-precision nodes polished by Newton
    iteration on the Legendre recurrence.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    if mode == "standard":
        return tuple(0.5 * (x + 1.0)), tuple(0.5 * w)
    ctx = EXTENDED.ctx
    nodes, weights = [], []
    for x0 in x:
        z = ctx.mpf(float(x0))
        for _ in range(6):
            p0, p1 = ctx.mpf(1), z
            for k in range(2, order + 1):
                p0, p1 = p1, ((2 * k - 1) * z * p1 - (k - 1) * p0) / k
            dp = order * (z * p1 - p0) / (z * z - 1)
            z -= p1 / dp
        p0, p1 = ctx.mpf(1), z
        for k in range(2, order + 1):
            p0, p1 = p1, ((2 * k - 1) * z * p1 - (k - 1) * p0) / k
        dp = order * (z * p1 - p0) / (z * z - 1)
        nodes.append((z + 1) / 2)
        weights.append(1 / ((1 - z * z) * dp * dp))
    return tuple(nodes), tuple(weights)
