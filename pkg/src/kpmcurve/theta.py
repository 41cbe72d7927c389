"""Riemann theta function and the finite-gap KP-II solution.

``theta(z | B) = sum_n exp(pi i n.B.n + 2 pi i n.z)`` over integer vectors n.

Before summing, the argument is reduced: with ``Y = Im B`` the integer shift
``m = round(-Y^-1 Im z)`` moves ``z`` to ``z' = z + B m`` and

    theta(z) = exp(pi i m.B.m + 2 pi i m.z) * theta(z')

so the dominant lattice terms sit near n = 0.  The prefactor is the
exponential of an affine function of z, so it only enters log-theta through a
linear term; second and higher log-derivatives never see it.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .numerics.jets import Jet3, jet_log

HARD_CAP = 30
MAX_ORDERS = (6, 2, 1)
_CHUNK = 64


class ThetaTruncationError(ValueError):
    pass


class DivisorCrossingError(ArithmeticError):
    pass


@dataclass(frozen=True)
class ThetaContext:
    B: np.ndarray
    trunc_radius: int
    term_tol: float
    lattice: np.ndarray = field(repr=False, compare=False)
    quad: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def build(cls, B, term_tol: float = 1e-16, trunc_radius: int | None = None) -> "ThetaContext":
        B = np.atleast_2d(np.asarray(B, dtype=complex))
        g = B.shape[0]
        Y = 0.5 * (B.imag + B.imag.T)
        q = np.linalg.eigvalsh(Y)
        if not q[0] > 0:
            raise ValueError("Im B must be positive definite")
        r_tol = math.sqrt(-math.log(term_tol) / math.pi)
        if trunc_radius is None:
            trunc_radius = math.ceil(r_tol / math.sqrt(q[0])) + 2
        if trunc_radius > HARD_CAP:
            raise ThetaTruncationError(
                f"theta truncation infeasible: radius {trunc_radius} exceeds {HARD_CAP}")
        n_max = trunc_radius
        # reduced arguments have |(Y^-1 Im z')_k| <= 1/2; bound their Y-norm
        corners = np.array(list(itertools.product((-0.5, 0.5), repeat=g)))
        c_bound = math.sqrt(max(float(c @ Y @ c) for c in corners))
        r_ell = math.sqrt(q[0]) * max(n_max - 2, 0) + c_bound
        grid = np.array(list(itertools.product(range(-n_max, n_max + 1), repeat=g)), dtype=float)
        norms = np.sqrt(np.einsum("li,ij,lj->l", grid, Y, grid))
        lattice = grid[norms <= r_ell + 1e-12] if n_max > 0 else grid
        quad = np.exp(1j * math.pi * np.einsum("li,ij,lj->l", lattice, B, lattice))
        return cls(B, int(trunc_radius), float(term_tol), lattice, quad)

    @property
    def genus(self) -> int:
        return self.B.shape[0]


def _reduce(z: np.ndarray, ctx: ThetaContext):
    """Return (z', log of the prefactor) for a batch of arguments (P, g)."""
    Y = ctx.B.imag
    m = np.round(-np.linalg.solve(Y, z.imag.T).T)
    zr = z + m @ ctx.B.T
    shift = np.floor(zr.real + 0.5)
    zr = zr - shift
    logpre = (1j * math.pi * np.einsum("pi,ij,pj->p", m, ctx.B, m)
              + 2j * math.pi * np.einsum("pi,pi->p", m, z))
    return zr, logpre


def _terms(zr: np.ndarray, ctx: ThetaContext) -> np.ndarray:
    """exp(pi i n.B.n + 2 pi i n.z') for every lattice vector: shape (P, L)."""
    phase = np.einsum("li,pi->pl", ctx.lattice, zr)
    return ctx.quad[None, :] * np.exp(2j * math.pi * phase)


def theta(z, ctx: ThetaContext) -> complex:
    """Truncated lattice sum at one argument (summation order fixed)."""
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    zr, logpre = _reduce(z, ctx)
    val = np.einsum("pl->p", _terms(zr, ctx))
    return complex(np.exp(logpre[0]) * val[0])


def log_theta(z, ctx: ThetaContext) -> complex:
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    zr, logpre = _reduce(z, ctx)
    val = np.einsum("pl->p", _terms(zr, ctx))
    return complex(logpre[0] + np.log(val[0]))


def _monomials(ctx: ThetaContext, dirs, orders):
    """(L, nx+1, ny+1, nt+1) array of a^p b^q d^r / (p! q! r!) where
    a, b, d are 2 pi i n.W for the three flow directions."""
    rates = [2j * math.pi * (ctx.lattice @ np.asarray(w, dtype=complex)) for w in dirs]
    nx, ny, nt = orders
    out = np.empty((len(ctx.lattice), nx + 1, ny + 1, nt + 1), dtype=complex)
    for p in range(nx + 1):
        for q in range(ny + 1):
            for r in range(nt + 1):
                out[:, p, q, r] = (rates[0] ** p * rates[1] ** q * rates[2] ** r
                                   / (factorial(p) * factorial(q) * factorial(r)))
    return out


def _reduced_jets(z0: np.ndarray, dirs, orders, ctx: ThetaContext):
    """Jet coefficients of theta(z' + dx W1 + dy W2 + dt W3) per base point,
    with the reduction prefactor returned separately."""
    mono = _monomials(ctx, dirs, orders)
    shape = mono.shape[1:]
    flat = mono.reshape(len(ctx.lattice), -1)
    coeffs = np.empty((len(z0), flat.shape[1]), dtype=complex)
    zr_all, logpre = _reduce(z0, ctx)
    # the same linear prefactor exp(2 pi i m.(W dx + ...)) rides along
    m = np.round(-np.linalg.solve(ctx.B.imag, z0.imag.T).T)
    for s in range(0, len(z0), _CHUNK):
        terms = _terms(zr_all[s:s + _CHUNK], ctx)
        coeffs[s:s + _CHUNK] = np.einsum("pl,lk->pk", terms, flat)
    jets = coeffs.T.reshape(shape + (len(z0),))
    lin = np.stack([2j * math.pi * (m @ np.asarray(w, dtype=complex)) for w in dirs])
    return jets, logpre, lin


@dataclass(frozen=True)
class FingapSolution:
    """Quasi-periodic solution data: theta context, flows W, constant C."""

    ctx: ThetaContext
    W: np.ndarray
    C: np.ndarray
    omega11: float

    @classmethod
    def from_riemann(cls, rd, C_imag=(0.0, 0.0, 0.0, 0.0), term_tol: float = 1e-16):
        c = np.asarray(C_imag)
        if np.iscomplexobj(c) and np.any(c.real != 0):
            raise ValueError("C must be purely imaginary: pass its imaginary parts")
        ctx = ThetaContext.build(rd.B_np(), term_tol)
        oh = rd.omega_hat_np()
        return cls(ctx, rd.W_np(), 1j * np.asarray(c, dtype=float), float(oh[0, 0].real))

    def argument(self, x, y, t):
        x, y, t = (np.asarray(v, dtype=float) for v in (x, y, t))
        return (x[..., None] * self.W[0] + y[..., None] * self.W[1]
                + t[..., None] * self.W[2] + self.C)


def theta_jet(x, y, t, sol: FingapSolution, orders=(2, 0, 0)) -> Jet3:
    """Taylor jet of theta along the flows at (x, y, t), batch over points.

    Overflows for arguments far from the fundamental domain; use
    :func:`log_theta_jet` there.
    """
    z0, dims, single = _points(x, y, t, sol)
    _check_orders(orders)
    jets, logpre, lin = _reduced_jets(z0, sol.W, orders, sol.ctx)
    j = Jet3(jets)
    pre = Jet3.affine(np.zeros(len(z0), dtype=complex), list(lin), orders)
    from .numerics.jets import jet_exp

    out = j * jet_exp(pre) * np.exp(logpre)
    return _unbatch(out, dims, single)


def log_theta_jet(x, y, t, sol: FingapSolution, orders=(2, 0, 0)) -> Jet3:
    z0, dims, single = _points(x, y, t, sol)
    _check_orders(orders)
    jets, logpre, lin = _reduced_jets(z0, sol.W, orders, sol.ctx)
    c0 = jets[0, 0, 0]
    if np.any(np.abs(c0) <= 1e-300):
        raise DivisorCrossingError("divisor crossing: theta vanishes at a grid point")
    j = jet_log(Jet3(jets))
    j = j + Jet3.affine(logpre, list(lin), orders)
    return _unbatch(j, dims, single)


def _check_orders(orders):
    if any(o > m for o, m in zip(orders, MAX_ORDERS)) or any(o < 0 for o in orders):
        raise ValueError(f"jet orders {orders} exceed the supported {MAX_ORDERS}")


def _points(x, y, t, sol):
    x, y, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, t)))
    single = x.ndim == 0
    dims = x.shape
    z0 = sol.argument(x.ravel(), y.ravel(), t.ravel())
    return z0, dims, single


def _unbatch(j: Jet3, dims, single):
    c = j.coeffs
    if single:
        return Jet3(c[..., 0])
    return Jet3(c.reshape(c.shape[:3] + dims))


def u_fingap(x, y, t, sol: FingapSolution, imag_tol: float = 1e-9):
    """``2 d_x^2 log theta + 2 omega_11`` at one point or a batch of points."""
    j = log_theta_jet(x, y, t, sol, (2, 0, 0))
    u = 2 * j.derivative_value(2, 0, 0) + 2 * sol.omega11
    im = np.max(np.abs(np.imag(u)))
    if im > imag_tol * max(1.0, float(np.max(np.abs(u)))):
        raise ArithmeticError(f"u_fingap has imaginary part {im:.3g}")
    return np.real(u) if np.ndim(u) else float(np.real(u))


def kp_residual_from_log_jet(F: Jet3, omega11: float):
    """KP-II residual of u = 2 F_xx + 2 omega11, from a (6, 2, 1) jet of F.

    Returns (residual, scale) with residual
    ``-4 u_xt + 6 u_x**2 + 6 u u_xx + u_xxxx + 3 u_yy`` and
    ``scale = max(1, |u_xxxx|, |u_yy|)``.
    """
    d = F.derivative_value
    u = 2 * d(2, 0, 0) + 2 * omega11
    ux = 2 * d(3, 0, 0)
    uxx = 2 * d(4, 0, 0)
    uxxxx = 2 * d(6, 0, 0)
    uxt = 2 * d(3, 0, 1)
    uyy = 2 * d(2, 2, 0)
    res = -4 * uxt + 6 * ux * ux + 6 * u * uxx + uxxxx + 3 * uyy
    scale = np.maximum(1.0, np.maximum(np.abs(uxxxx), np.abs(uyy)))
    return res, scale


def kp_residual_fingap(x, y, t, sol: FingapSolution):
    """Relative KP-II residual at a point (or batch)."""
    F = log_theta_jet(x, y, t, sol, MAX_ORDERS)
    res, scale = kp_residual_from_log_jet(F, sol.omega11)
    out = np.abs(res) / scale
    return out if np.ndim(out) else float(out)
