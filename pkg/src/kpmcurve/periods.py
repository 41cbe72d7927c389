"""Differentials on the curve, their periods, and the normalized data.

Holomorphic basis: ``num * dlam / P_mu`` with ``num`` in ``1, lam, mu,
lam**2 - mu**2``.  Second-kind basis: ``lam**(j-1) * Q * dlam / P_mu``, each
with a single pole at P0 of principal part ``lam**(j-1) dlam``.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .curve import (
    ContinuationError,
    CurvePoint,
    SpectralParams,
    branch_points,
    guard_radius,
    newton_mu,
    p0_branch,
    p_mu,
    q_on_curve,
    track_segment,
)
from .cycles import CycleBasis, CycleSum, build_cycles
from .numerics import (
    LineSegment,
    QuadratureError,
    integrate_interval,
    laurent_coefficients,
)
from .numerics.precision import get_precision

NUMERATORS = ("1", "lam", "mu", "lam2-mu2", "Q", "lamQ", "lam2Q")
HOLOMORPHIC = NUMERATORS[:4]
MEROMORPHIC = NUMERATORS[4:]
DEFAULT_TOL = {"standard": 1e-12, "extended": 1e-26}
QUAD_ORDER = {"standard": 10, "extended": 20}


class DegenerateBasisError(ArithmeticError):
    pass


class RoutingError(RuntimeError):
    pass


@dataclass(frozen=True)
class DifferentialSpec:
    numerator: str

    def __post_init__(self):
        if self.numerator not in NUMERATORS:
            raise ValueError(f"unknown numerator {self.numerator!r}")

    @property
    def holomorphic(self) -> bool:
        return self.numerator in HOLOMORPHIC

    def value(self, lam, mu, params: SpectralParams):
        """The differential divided by dlam."""
        return differential_values(lam, mu, params)[NUMERATORS.index(self.numerator)]


def differential_values(lam, mu, params: SpectralParams):
    """All seven differentials divided by dlam, in ``NUMERATORS`` order."""
    inv = 1 / p_mu(lam, mu, params)
    q = q_on_curve(lam, mu, params) * inv
    return [inv, lam * inv, mu * inv, (lam * lam - mu * mu) * inv, q, lam * q, lam * lam * q]


# ---------------------------------------------------------------------------
# integration along cycles


def _segment_integral(seg, track, params, tol, which):
    prec = params.prec

    def g(t):
        lam = seg.point(t, prec)
        mu = track.mu_at(t)
        dl = seg.deriv(t, prec)
        vals = differential_values(lam, mu, params)
        return [vals[k] * dl for k in which]

    val, _ = integrate_interval(g, 0, 1, tol, prec, order=QUAD_ORDER[prec.name])
    return val


def cycle_periods(cycle, params: SpectralParams, tol=None, which=range(7)):
    """Integrals of the selected differentials over a cycle (or CycleSum)."""
    which = list(which)
    prec = params.prec
    tol = DEFAULT_TOL[prec.name] if tol is None else tol
    if isinstance(cycle, CycleSum):
        total = [prec.scalar(0)] * len(which)
        for k, c in cycle.terms:
            part = cycle_periods(c, params, tol, which)
            total = [x + k * y for x, y in zip(total, part)]
        return total
    tracks = cycle.tracks(params.precision)
    total = [prec.scalar(0)] * len(which)
    per = tol / len(cycle.segments)
    for n, (seg, tr) in enumerate(zip(cycle.segments, tracks)):
        try:
            part = _segment_integral(seg, tr, params, per, which)
        except QuadratureError as exc:
            raise QuadratureError(f"cycle {cycle.label}, segment {n}: {exc}",
                                  exc.estimate, exc.error) from exc
        except ContinuationError as exc:
            raise ContinuationError(f"cycle {cycle.label}, segment {n}: {exc}") from exc
        total = [x + y for x, y in zip(total, part)]
    return total


def integrate_differential(spec: DifferentialSpec, cycle, params: SpectralParams, tol=None):
    return cycle_periods(cycle, params, tol, [NUMERATORS.index(spec.numerator)])[0]


@dataclass
class PeriodTable:
    """Rows: cycles; columns: the seven differentials in ``NUMERATORS`` order."""

    a: list
    b: list
    c: list


def period_table(params: SpectralParams, basis: CycleBasis | None = None, tol=None):
    return _period_table(params, tol if tol is not None else DEFAULT_TOL[params.precision])


@lru_cache(maxsize=16)
def _period_table(params: SpectralParams, tol):
    basis = build_cycles(params.with_precision("standard"))
    c = [cycle_periods(cyc, params, tol) for cyc in basis.c]
    b = [cycle_periods(cyc, params, tol) for cyc in basis.b]
    a = []
    for cs in basis.a:
        row = [0 * c[0][0]] * 7
        for k, cyc in cs.terms:
            i = [x.label for x in basis.c].index(cyc.label)
            row = [x + k * y for x, y in zip(row, c[i])]
        a.append(row)
    return PeriodTable(a, b, c)


# ---------------------------------------------------------------------------
# small dense linear algebra in the working precision


def _matmul(x, y):
    return [[sum((x[i][k] * y[k][j] for k in range(len(y))), 0 * x[0][0])
             for j in range(len(y[0]))] for i in range(len(x))]


def _inverse(a, prec):
    n = len(a)
    eye = [[prec.scalar(1 if i == j else 0) for j in range(n)] for i in range(n)]
    return prec.solve(a, eye)


def _to_np(m) -> np.ndarray:
    return np.array([[complex(v) for v in row] for row in m]) if isinstance(m[0], list) \
        else np.array([complex(v) for v in m])


# ---------------------------------------------------------------------------
# Riemann data


@dataclass
class RiemannData:
    precision: str
    B: list
    hol_coeffs: list
    a_hol: list
    W: list = field(default_factory=list)
    omega_hat: list = field(default_factory=list)
    sk_coeffs: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def genus(self) -> int:
        return len(self.B)

    def B_np(self) -> np.ndarray:
        return _to_np(self.B)

    def W_np(self) -> np.ndarray:
        return np.array([[complex(v) for v in w] for w in self.W])

    def omega_hat_np(self) -> np.ndarray:
        return np.array([[complex(v) for v in row] for row in self.omega_hat])

    def to_text(self) -> str:
        prec = get_precision(self.precision)
        out = [f"precision = {self.precision}"]

        def put(key, z):
            out.append(f"{key} = {prec.fmt(z.real)} {prec.fmt(z.imag)}")

        for name, m in (("B", self.B), ("hol_coeffs", self.hol_coeffs), ("a_hol", self.a_hol),
                        ("omega_hat", self.omega_hat), ("sk_coeffs", self.sk_coeffs)):
            for i, row in enumerate(m):
                for j, z in enumerate(row):
                    put(f"{name}[{i + 1},{j + 1}]", prec.scalar(z))
        for i, w in enumerate(self.W):
            for k, z in enumerate(w):
                put(f"W{i + 1}[{k + 1}]", prec.scalar(z))
        for key in sorted(self.diagnostics):
            out.append(f"diag.{key} = {float(self.diagnostics[key])!r}")
        return "\n".join(out) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "RiemannData":
        vals = {}
        for line in text.splitlines():
            if "=" in line:
                k, v = line.split("=", 1)
                vals[k.strip()] = v.strip()
        prec = get_precision(vals.pop("precision"))

        def num(s):
            re, im = s.split()
            if prec.name == "extended":
                return prec.ctx.mpc(re, im)
            return complex(float(re), float(im))

        def matrix(name):
            keys = [k for k in vals if k.startswith(name + "[")]
            idx = [tuple(int(x) for x in k[len(name) + 1:-1].split(",")) for k in keys]
            if not idx:
                return []
            n, m = max(i for i, _ in idx), max(j for _, j in idx)
            return [[num(vals[f"{name}[{i},{j}]"]) for j in range(1, m + 1)] for i in range(1, n + 1)]

        W = []
        for i in range(1, 4):
            keys = sorted((k for k in vals if k.startswith(f"W{i}[")),
                          key=lambda k: int(k[3:-1]))
            if keys:
                W.append([num(vals[k]) for k in keys])
        diags = {k[5:]: float(v) for k, v in vals.items() if k.startswith("diag.")}
        return cls(prec.name, matrix("B"), matrix("hol_coeffs"), matrix("a_hol"), W,
                   matrix("omega_hat"), matrix("sk_coeffs"), diags)


def normalize_holomorphic(params: SpectralParams, basis: CycleBasis | None = None,
                          tol=None) -> RiemannData:
    """B and the change of basis to differentials with unit a-periods."""
    prec = params.prec
    tab = period_table(params, basis, tol)
    a_sig = [row[:4] for row in tab.a]
    b_sig = [row[:4] for row in tab.b]
    cond = float(np.linalg.cond(_to_np(a_sig)))
    if not cond < 1e12:
        raise DegenerateBasisError(f"degenerate basis: a-period matrix condition number {cond:.3g}")
    hol = _inverse(a_sig, prec)
    B = _matmul(b_sig, hol)
    a_hol = _matmul(a_sig, hol)
    Bn = _to_np(B)
    diags = {
        "a_period_condition": cond,
        "a_identity_defect": float(np.max(np.abs(_to_np(a_hol) - np.eye(4)))),
        "B_symmetry_defect": _sym_defect(B) / float(np.max(np.abs(Bn))),
        "B_real_part_defect": float(np.max(np.abs(Bn.real)) / np.max(np.abs(Bn))),
        "ImB_min_eigenvalue": float(np.min(np.linalg.eigvalsh(0.5 * (Bn.imag + Bn.imag.T)))),
    }
    return RiemannData(prec.name, B, hol, a_hol, diagnostics=diags)


def _sym_defect(m) -> float:
    n = len(m)
    return max(float(abs(m[i][j] - m[j][i])) for i in range(n) for j in range(n))


def second_kind(j: int, params: SpectralParams, basis: CycleBasis | None = None, tol=None):
    """Coefficients of the normalized second-kind differential in the
    (sigma_1..sigma_4, Sigma_1..Sigma_3) basis: ``j*Sigma_j`` plus the
    holomorphic part cancelling all a-periods."""
    if j not in (1, 2, 3):
        raise ValueError("second-kind index must be 1, 2 or 3")
    prec = params.prec
    tab = period_table(params, basis, tol)
    a_sig = [row[:4] for row in tab.a]
    rhs = [-j * row[3 + j] for row in tab.a]
    d = prec.solve(a_sig, rhs)
    coeffs = list(d) + [prec.scalar(0)] * 3
    coeffs[3 + j] = prec.scalar(j)
    return coeffs


def _combine(coeffs, rows):
    return [sum((k * r[n] for n, k in enumerate(coeffs)), 0 * r[0]) for r in rows]


def second_kind_on_p0(coeffs, lam, params: SpectralParams, mu=None):
    """The second-kind differential divided by dlam at lam on the P0 branch."""
    mu = p0_branch(lam, params) if mu is None else mu
    vals = differential_values(lam, mu, params)
    return sum((k * v for k, v in zip(coeffs, vals)), 0 * vals[0])


def laurent_on_p0(coeffs, orders, params: SpectralParams, polynomial_part: int | None = None,
                  radius=None):
    """Laurent coefficients in lam of a differential/dlam on the P0 branch.

    ``polynomial_part = j`` subtracts ``j * lam**(j-1)`` before sampling.
    """
    prec = params.prec
    radius = params.radius_far if radius is None else radius
    j = polynomial_part

    def f(lam):
        v = second_kind_on_p0(coeffs, lam, params)
        if j:
            v = v - j * lam ** (j - 1)
        return v

    return laurent_coefficients(f, prec.scalar(0), prec.real(radius) if prec.name == "extended"
                                else float(radius), orders, prec)


def riemann_data(params: SpectralParams, basis: CycleBasis | None = None, tol=None) -> RiemannData:
    """Full normalized data: B, W vectors, omega_hat and diagnostics."""
    return _riemann_data(params, tol if tol is not None else DEFAULT_TOL[params.precision])


@lru_cache(maxsize=16)
def _riemann_data(params: SpectralParams, tol) -> RiemannData:
    prec = params.prec
    rd = normalize_holomorphic(params, None, tol)
    tab = period_table(params, None, tol)
    two_pi_i = 2 * prec.pi * prec.scalar(1j)
    sk, W, oh = [], [], []
    residues = []
    for j in (1, 2, 3):
        cf = second_kind(j, params, None, tol)
        sk.append(cf)
        W.append([v / two_pi_i for v in _combine(cf, tab.b)])
        lc = laurent_on_p0(cf, (-1, -2, -3, -4), params, polynomial_part=j)
        residues.append(float(abs(lc[-1])))
        oh.append([lc[-(k + 1)] for k in (1, 2, 3)])
    if max(residues) > 1e-8:
        raise ArithmeticError(f"second-kind residue {max(residues):.3g} at P0")
    rd.W, rd.sk_coeffs, rd.omega_hat = W, sk, oh
    Wn = rd.W_np()
    ohn = rd.omega_hat_np()
    a_sk = [_combine(cf, tab.a) for cf in sk]
    rd.diagnostics.update({
        "W_real_part_defect": float(np.max(np.abs(Wn.real)) / np.max(np.abs(Wn))),
        "omega_hat_symmetry_defect": _sym_defect(oh),
        "omega_hat_imag_defect": float(np.max(np.abs(ohn.imag))),
        "second_kind_a_period_defect": max(float(abs(v)) for row in a_sk for v in row),
        "second_kind_residue": max(residues),
    })
    return rd


def w_vectors(params: SpectralParams, basis: CycleBasis | None = None, tol=None):
    return riemann_data(params, basis, tol).W


def omega_hat(params: SpectralParams, basis: CycleBasis | None = None, tol=None):
    return riemann_data(params, basis, tol).omega_hat


# ---------------------------------------------------------------------------
# Abel map


def _hol_normalized(lam, mu, params, hol):
    vals = differential_values(lam, mu, params)[:4]
    return [sum((vals[l] * hol[l][m] for l in range(4)), 0 * vals[0]) for m in range(4)]


def abel_from_p0(lam, params: SpectralParams, rd: RiemannData, tol=None):
    """Abel map from P0 to the point over ``lam`` on the P0 branch.

    Integrated in ``w = 1/lam`` along the straight segment from w = 0, where
    the normalized differentials are regular.
    """
    prec = params.prec
    tol = DEFAULT_TOL[prec.name] if tol is None else tol
    w1 = 1 / prec.scalar(lam)
    hol = rd.hol_coeffs

    def g(t):
        w = t * w1
        lam_t = 1 / w
        mu = p0_branch(lam_t, params)
        vals = _hol_normalized(lam_t, mu, params, hol)
        # d lam = -dw / w**2, dw = w1 dt
        jac = -w1 / (w * w)
        return [v * jac for v in vals]

    val, _ = integrate_interval(g, 0, 1, tol, prec, order=QUAD_ORDER[prec.name])
    return val


def second_kind_tail(j: int, lam, params: SpectralParams, rd: RiemannData, tol=None):
    """``int_P0^P (omega_j - d(lam**j))`` for P over ``lam`` on the P0 branch."""
    prec = params.prec
    tol = DEFAULT_TOL[prec.name] if tol is None else tol
    cf = rd.sk_coeffs[j - 1]
    w1 = 1 / prec.scalar(lam)

    def g(t):
        w = t * w1
        lam_t = 1 / w
        v = second_kind_on_p0(cf, lam_t, params) - j * lam_t ** (j - 1)
        return v * (-w1 / (w * w))

    val, _ = integrate_interval(g, 0, 1, tol, prec, order=QUAD_ORDER[prec.name])
    return val


def abel_expansion(params: SpectralParams, rd: RiemannData, radius, samples: int = 32, tol=None):
    """Coefficients of lam**-1, lam**-2, lam**-3 of the Abel map on the P0
    branch, from samples on the circle |lam| = radius."""
    prec = params.prec
    vals = [abel_from_p0(radius * prec.cis(2 * prec.pi * k / samples), params, rd, tol)
            for k in range(samples)]
    out = []
    for m in range(4):
        col = [v[m] for v in vals]
        c = laurent_coefficients(None, 0, radius, (-1, -2, -3), prec, samples=samples, values=col)
        out.append([c[-1], c[-2], c[-3]])
    # out[m][n]: component m, coefficient of lam**-(n+1)
    return [[out[m][n] for m in range(4)] for n in range(3)]


def route(z0: complex, z1: complex, params: SpectralParams, via=()):
    """Polyline from z0 to z1 through waypoints, keeping clear of branch points.

    Waypoints sit on rings around each branch point; the shortest visible
    chain is chosen (Dijkstra with index tie-breaking), so the route is
    deterministic.  ``via`` forces intermediate points, visited in order.
    """
    stops = [complex(z0)] + [complex(v) for v in via] + [complex(z1)]
    pts = []
    for s, e in zip(stops, stops[1:]):
        leg = _route_leg(s, e, params)
        pts.extend(leg if not pts else leg[1:])
    return [LineSegment(a, b) for a, b in zip(pts, pts[1:]) if a != b]


def _route_leg(z0, z1, params):
    bps = np.array([complex(b.lam) for b in branch_points(params)])
    g = guard_radius(params)
    clear = 1.5 * g
    ring = 3.0 * g
    ang = np.exp(1j * (np.pi / 8 + np.pi / 4 * np.arange(8)))
    wp = (bps[:, None] + ring * ang[None, :]).ravel()
    d_wp = np.min(np.abs(wp[:, None] - bps[None, :]), axis=1)
    wp = wp[d_wp > clear]
    nodes_ = np.concatenate([[z0, z1], wp])
    n = len(nodes_)
    a = nodes_[:, None, None]
    b = nodes_[None, :, None]
    c = bps[None, None, :]
    ab = b - a
    denom = np.where(np.abs(ab) == 0, 1, np.abs(ab) ** 2)
    t = np.clip(((c - a) * np.conj(ab)).real / denom, 0, 1)
    dist = np.abs(a + t * ab - c)
    # endpoints inside a ring may leave through their own disk
    own = np.abs(nodes_[:, None] - bps[None, :]) <= clear
    blocked = (dist <= clear) & ~own[:, None, :] & ~own[None, :, :]
    visible = ~np.any(blocked, axis=2)
    length = np.abs(nodes_[:, None] - nodes_[None, :])
    best = [math.inf] * n
    prev = [-1] * n
    best[0] = 0.0
    heap = [(0.0, 0)]
    while heap:
        d, i = heapq.heappop(heap)
        if d > best[i]:
            continue
        if i == 1:
            break
        for j in range(n):
            if j != i and visible[i, j]:
                nd = d + float(length[i, j])
                if nd < best[j] - 1e-15:
                    best[j] = nd
                    prev[j] = i
                    heapq.heappush(heap, (nd, j))
    if not math.isfinite(best[1]):
        raise RoutingError("no route between the points avoids the branch points")
    path = [1]
    while path[-1] != 0:
        path.append(prev[path[-1]])
    return [complex(nodes_[k]) for k in reversed(path)]


def abel_map(P: CurvePoint, base: CurvePoint, params: SpectralParams, rd: RiemannData,
             via=(), tol=None):
    """Integral of the normalized holomorphic differentials from base to P.

    The path is auto-routed in the lambda-plane and mu is continued from
    ``base``; it must arrive on P's sheet.
    """
    prec = params.prec
    tol = DEFAULT_TOL[prec.name] if tol is None else tol
    if complex(P.lam) == complex(base.lam) and not via:
        if abs(complex(P.mu) - complex(base.mu)) > 1e-9 * (1 + abs(complex(P.mu))):
            raise RoutingError("points share lambda but lie on different sheets")
        return [prec.scalar(0)] * 4
    segs = route(complex(base.lam), complex(P.lam), params, via)
    mu = newton_mu(base.lam, base.mu, params)
    total = [prec.scalar(0)] * 4
    hol = rd.hol_coeffs
    for seg in segs:
        tr = track_segment(seg, mu, params)

        def g(t, seg=seg, tr=tr):
            lam = seg.point(t, prec)
            vals = _hol_normalized(lam, tr.mu_at(t), params, hol)
            dl = seg.deriv(t, prec)
            return [v * dl for v in vals]

        part, _ = integrate_interval(g, 0, 1, tol / len(segs), prec, order=QUAD_ORDER[prec.name])
        total = [x + y for x, y in zip(total, part)]
        mu = tr.end.mu
    if abs(complex(mu) - complex(P.mu)) > 1e-7 * (1 + abs(complex(P.mu))):
        raise RoutingError("route arrives on a different sheet than the target point")
    return total


def lattice_reduce(v, B):
    """Write a 4-vector as m + B n + r with integer m, n; returns (m, n, r)."""
    v = np.array([complex(x) for x in v])
    Bn = np.array(B, dtype=complex)
    n = np.round(np.linalg.solve(Bn.imag, v.imag))
    m = np.round((v - Bn @ n).real)
    r = v - m - Bn @ n
    return m.astype(int), n.astype(int), r
