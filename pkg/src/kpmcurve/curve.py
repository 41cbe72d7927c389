"""The five-line plane curve and its perturbation.

The curve is ``P(lam, mu) = P0(lam, mu) + eps * (beta**2 - mu**2) = 0`` with

    P0 = mu * (mu - (lam - k1)) * (mu + (lam - k2)) * (mu - (lam - k3)) * (mu + (lam - k4))

Its lines are Gamma0 (mu = 0), Gamma13, Gamma23 (slope +1) and Sigma23,
Sigma24 (slope -1).  As a cover of the lambda-line it has five sheets; the
distinguished point P0 is lam = infinity on the sheet asymptotic to mu = 0.
"""
from __future__ import annotations

import bisect
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache

import mpmath
import numpy as np
import sympy

from .numerics import Precision, get_precision, solve_polynomial
from .numerics.roots import horner

LINES = ("Gamma0", "Gamma13", "Sigma23", "Gamma23", "Sigma24")
# slope of each line in the (lam, mu) plane and the kappa index of its lam-intercept
_SLOPE = {"Gamma0": 0, "Gamma13": 1, "Sigma23": -1, "Gamma23": 1, "Sigma24": -1}
_KAPPA_OF = {"Gamma13": 0, "Sigma23": 1, "Gamma23": 2, "Sigma24": 3}


class ContinuationError(ArithmeticError):
    pass


class NodalCurveError(ValueError):
    pass


@dataclass(frozen=True)
class SpectralParams:
    kappa: tuple[float, float, float, float]
    epsilon: float
    precision: str = "standard"

    def __post_init__(self):
        k = tuple(float(v) for v in self.kappa)
        if len(k) != 4:
            raise ValueError("kappa needs exactly four phases")
        if not all(a < b for a, b in zip(k, k[1:])):
            raise ValueError(f"kappa must be strictly increasing, got {k}")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.epsilon > 0.1:
            warnings.warn(f"epsilon={self.epsilon} is not small; the M-curve regime may be lost",
                          stacklevel=2)
        object.__setattr__(self, "kappa", k)
        object.__setattr__(self, "epsilon", float(self.epsilon))
        get_precision(self.precision)

    @property
    def prec(self) -> Precision:
        return get_precision(self.precision)

    @property
    def beta(self) -> float:
        k1, k2, k3, k4 = self.kappa
        return (k4 - k1) / 4 + max(k2 - k1, k3 - k2, k4 - k3) / 4

    @cached_property
    def _scalars(self):
        prec = self.prec
        k = [prec.real(x) for x in self.kappa]
        eps = prec.real(self.epsilon)
        beta = (k[3] - k[0]) / 4 + max(k[1] - k[0], k[2] - k[1], k[3] - k[2]) / 4
        return k, eps, beta

    def with_epsilon(self, epsilon):
        return SpectralParams(self.kappa, epsilon, self.precision)

    def with_precision(self, precision):
        return SpectralParams(self.kappa, self.epsilon, precision)

    @property
    def radius_far(self) -> float:
        """Radius beyond which every sheet is single valued: 4 * max|kappa|."""
        return 4.0 * max(abs(v) for v in self.kappa)


@dataclass(frozen=True)
class CurvePoint:
    lam: complex
    mu: complex


@dataclass(frozen=True)
class Node:
    """A finite double point of the eps = 0 line arrangement."""

    lam: float
    mu: float
    lines: tuple[str, str]

    @property
    def on_axis(self) -> bool:
        return "Gamma0" in self.lines


@dataclass(frozen=True)
class BranchPoint:
    lam: complex
    mu: complex
    is_real: bool
    node: int = -1


# ---------------------------------------------------------------------------
# polynomial evaluation


def _shifts(lam, params: SpectralParams):
    k = params._scalars[0]
    return (k[0] - lam, lam - k[1], k[2] - lam, lam - k[3])


_DSHIFT = (-1, 1, -1, 1)


def _elementary(vals):
    e = [1, 0, 0, 0, 0]
    for v in vals:
        for j in range(4, 0, -1):
            e[j] = e[j] + v * e[j - 1]
    return e


def mu_coefficients(lam, params: SpectralParams):
    """Ascending coefficients of ``P(lam, .)`` as a polynomial in mu (degree 5)."""
    _, eps, beta = params._scalars
    e = _elementary(_shifts(lam, params))
    return [eps * beta * beta, e[4], e[3] - eps, e[2], e[1], 1 + 0 * e[1]]


def _dlam_coefficients(lam, params: SpectralParams):
    """d/dlam of the mu-coefficients; the mu**j coefficient is e_{5-j} of the shifts."""
    a = _shifts(lam, params)
    de = [0 * a[0]] * 5
    for i in range(4):
        e = _elementary([a[j] for j in range(4) if j != i])
        for k in range(1, 5):
            de[k] += _DSHIFT[i] * e[k - 1]
    return [0 * a[0], de[4], de[3], de[2], de[1], 0 * a[0]]


def p0_value(lam, mu, params: SpectralParams):
    out = mu
    for a in _shifts(lam, params):
        out = out * (mu + a)
    return out


def p_value(lam, mu, params: SpectralParams):
    _, eps, beta = params._scalars
    return p0_value(lam, mu, params) + eps * (beta * beta - mu * mu)


def _p_and_pmu(lam, mu, params: SpectralParams):
    """P and P_mu from the factored form, which keeps relative accuracy
    where two line factors are small at once (near a node)."""
    _, eps, beta = params._scalars
    f = [mu + a for a in _shifts(lam, params)]
    f01, f23 = f[0] * f[1], f[2] * f[3]
    prod = f01 * f23
    dprod = (f[0] + f[1]) * f23 + f01 * (f[2] + f[3])
    p = mu * prod + eps * (beta * beta - mu * mu)
    pm = prod + mu * dprod - 2 * eps * mu
    return p, pm


def p_mu(lam, mu, params: SpectralParams):
    return _p_and_pmu(lam, mu, params)[1]


def p_lam(lam, mu, params: SpectralParams):
    return horner(_dlam_coefficients(lam, params), mu)[0]


def q_value(lam, mu, params: SpectralParams):
    """``Q = (P - eps beta^2) / mu`` as the exact quotient polynomial."""
    _, eps, _ = params._scalars
    out = 1
    for a in _shifts(lam, params):
        out = out * (mu + a)
    return out - eps * mu


def q_on_curve(lam, mu, params: SpectralParams):
    """Q at a point of the curve, choosing the better conditioned of the two
    equal expressions ``-eps beta^2 / mu`` and the quotient polynomial."""
    _, eps, beta = params._scalars
    if eps != 0 and abs(mu) > 0.5:
        return -eps * beta * beta / mu
    return q_value(lam, mu, params)


def eval_curve(which: str, pt: CurvePoint, params: SpectralParams):
    """Evaluate ``P0``, ``P``, ``Q`` or ``Pmu`` at a (lam, mu) point."""
    if which == "P0":
        return p0_value(pt.lam, pt.mu, params)
    if which == "P":
        return p_value(pt.lam, pt.mu, params)
    if which == "Q":
        return q_value(pt.lam, pt.mu, params)
    if which == "Pmu":
        return p_mu(pt.lam, pt.mu, params)
    if which == "Plam":
        return p_lam(pt.lam, pt.mu, params)
    raise ValueError(f"unknown curve function {which!r}")


def residual_scale(lam, mu, params: SpectralParams) -> float:
    """Sum of absolute values of the monomials of P at (lam, mu)."""
    c = mu_coefficients(lam, params)
    am = abs(mu)
    return float(sum(abs(ci) * am**i for i, ci in enumerate(c)))


# ---------------------------------------------------------------------------
# sheets


def mu_branches(lam, params: SpectralParams):
    """The five mu-roots of ``P(lam, .)`` in the working precision."""
    return solve_polynomial(mu_coefficients(lam, params), params.prec)


def _float_branches(lam, params: SpectralParams) -> np.ndarray:
    c = mu_coefficients(complex(lam), params.with_precision("standard"))
    return np.roots([complex(x) for x in reversed(c)])


def newton_mu(lam, mu, params: SpectralParams, iters: int = 12):
    """Polish a mu-root of ``P(lam, .)`` by Newton iteration."""
    prec = params.prec
    mu = prec.scalar(mu)
    tiny = 8 * prec.eps
    for _ in range(iters):
        p, dp = _p_and_pmu(lam, mu, params)
        if dp == 0:
            break
        step = p / dp
        mu -= step
        if abs(step) <= tiny * (1 + abs(mu)):
            break
    return mu


def nodes(params: SpectralParams) -> list[Node]:
    """The eight finite nodes of the eps = 0 arrangement, in closed form."""
    k1, k2, k3, k4 = params.kappa
    out = [
        Node(k1, 0.0, ("Gamma0", "Gamma13")),
        Node(k2, 0.0, ("Gamma0", "Sigma23")),
        Node(k3, 0.0, ("Gamma0", "Gamma23")),
        Node(k4, 0.0, ("Gamma0", "Sigma24")),
    ]
    for g, kg in (("Gamma13", k1), ("Gamma23", k3)):
        for s, ks in (("Sigma23", k2), ("Sigma24", k4)):
            lam = (kg + ks) / 2
            out.append(Node(lam, lam - kg, (g, s)))
    return out


@lru_cache(maxsize=64)
def _branch_lambdas(kappa, epsilon):
    """Roots of the resultant Res_mu(P, P_mu) from exact rational arithmetic."""
    lam, mu = sympy.symbols("lam mu")
    k = [sympy.Rational(Fraction(v)) for v in kappa]
    eps = sympy.Rational(Fraction(epsilon))
    beta = (k[3] - k[0]) / 4 + sympy.Max(k[1] - k[0], k[2] - k[1], k[3] - k[2]) / 4
    p = (mu * (mu - (lam - k[0])) * (mu + (lam - k[1])) * (mu - (lam - k[2]))
         * (mu + (lam - k[3])) + eps * (beta**2 - mu**2))
    p = sympy.Poly(sympy.expand(p), mu)
    res = sympy.Poly(sympy.resultant(p, p.diff(mu)), lam)
    coeffs = [sympy.Rational(c) for c in res.all_coeffs()]
    if all(c == 0 for c in coeffs) or res.degree() <= 0:
        raise NodalCurveError("curve is nodal: the resultant of (P, P_mu) vanishes")
    with mpmath.workdps(80):
        roots = mpmath.polyroots([mpmath.mpf(c.p) / c.q for c in coeffs], maxsteps=400,
                                 extraprec=400)
        out = []
        for r in roots:
            r = mpmath.mpc(r)
            if abs(r.imag) < mpmath.mpf(10) ** -40:
                r = mpmath.mpc(r.real, 0)
            out.append((str(r.real), str(r.imag)))
    return tuple(out)


def _polish_branch_point(lam, mu, params: SpectralParams, iters: int = 30):
    """2-D Newton on P = P_mu = 0."""
    prec = params.prec
    for _ in range(iters):
        c = mu_coefficients(lam, params)
        dc = _dlam_coefficients(lam, params)
        p, pm = horner(c, mu)
        dcoef = [i * c[i] for i in range(1, 6)]
        _, pmm = horner(dcoef, mu)
        pl, plm = horner(dc, mu)
        det = pl * pmm - pm * plm
        if det == 0:
            break
        dl = (p * pmm - pm * pm) / det
        dm = (pl * pm - plm * p) / det
        lam -= dl
        mu -= dm
        if abs(dl) + abs(dm) <= 16 * prec.eps * (1 + abs(lam) + abs(mu)):
            break
    return lam, mu


def branch_points(params: SpectralParams) -> list[BranchPoint]:
    """All finite branch points of the lambda-projection, sorted by (Re, Im).

    Each is verified to satisfy ``|P| + |P_mu| < tol`` and tagged with the
    eps = 0 node it emanates from.
    """
    if params.epsilon == 0:
        raise NodalCurveError("curve is nodal at eps = 0: there are nodes, not branch points")
    return list(_branch_points_cached(params))


@lru_cache(maxsize=64)
def _branch_points_cached(params: SpectralParams):
    prec = params.prec
    seeds = _branch_lambdas(params.kappa, params.epsilon)
    node_list = nodes(params)
    out = []
    for re_s, im_s in seeds:
        if prec.name == "extended":
            lam = prec.ctx.mpc(re_s, im_s)
        else:
            lam = complex(float(re_s), float(im_s))
        roots = _float_branches(lam, params)
        pairs = [(abs(roots[i] - roots[j]), (roots[i] + roots[j]) / 2)
                 for i in range(5) for j in range(i + 1, 5)]
        mu = prec.scalar(complex(min(pairs, key=lambda t: t[0])[1]))
        is_real = im_s.strip("-0.") == "" or float(im_s) == 0.0
        if is_real:
            mu = prec.scalar(complex(mu).real)
        lam, mu = _polish_branch_point(lam, mu, params)
        if is_real:
            lam = prec.scalar(prec.real(lam.real))
            mu = prec.scalar(prec.real(mu.real))
        res = abs(p_value(lam, mu, params)) + abs(p_mu(lam, mu, params))
        if float(res) > 1e-10 * max(1.0, residual_scale(lam, mu, params)):
            raise ArithmeticError(f"branch point polish failed near lam={complex(lam)}")
        zl, zm = complex(lam), complex(mu)
        node = min(range(len(node_list)),
                   key=lambda i: abs(zl - node_list[i].lam) + abs(zm - node_list[i].mu))
        out.append(BranchPoint(lam, mu, is_real, node))
    out.sort(key=lambda b: (float(b.lam.real), float(b.lam.imag)))
    return tuple(out)


def guard_radius(params: SpectralParams) -> float:
    """Exclusion radius around branch points: a tenth of the closest pair."""
    bps = branch_points(params)
    z = [complex(b.lam) for b in bps]
    d = min(abs(z[i] - z[j]) for i in range(len(z)) for j in range(i + 1, len(z)))
    return 0.1 * d


def p0_branch(lam, params: SpectralParams):
    """mu on the sheet through P0, for |lam| beyond every branch point."""
    prec = params.prec
    k, eps, beta = params._scalars
    if abs(complex(lam)) <= 2 * max(abs(v) for v in params.kappa):
        raise ValueError("p0_branch is only defined for |lam| > 2 max|kappa|")
    if params.epsilon == 0:
        return prec.scalar(0)
    lead = -eps * beta * beta
    for kk in k:
        lead = lead / (lam - kk)
    roots = _float_branches(lam, params)
    d = sorted(abs(r - complex(lead)) for r in roots)
    if not d[0] < 0.5 * d[1]:
        raise ContinuationError("p0_branch: two roots are equally close to the P0 asymptote")
    best = min(roots, key=lambda r: abs(r - complex(lead)))
    start = lead if abs(best - complex(lead)) < 1e-3 * abs(complex(lead)) else best
    return newton_mu(lam, start, params)


def dmu_dlam(lam, mu, params: SpectralParams):
    return -p_lam(lam, mu, params) / p_mu(lam, mu, params)


# ---------------------------------------------------------------------------
# continuation


@dataclass
class Track:
    """mu continued along one path segment, sampled at adaptive steps."""

    segment: object
    params: SpectralParams
    ts: list = field(default_factory=list)
    lams: list = field(default_factory=list)
    mus: list = field(default_factory=list)
    dmus: list = field(default_factory=list)
    seps: list = field(default_factory=list)

    @property
    def start(self) -> CurvePoint:
        return CurvePoint(self.lams[0], self.mus[0])

    @property
    def end(self) -> CurvePoint:
        return CurvePoint(self.lams[-1], self.mus[-1])

    def mu_at(self, t):
        tf = float(t)
        i = min(max(bisect.bisect_right(self.ts, tf) - 1, 0), len(self.ts) - 2)
        t0, t1 = self.ts[i], self.ts[i + 1]
        h = t1 - t0
        s = (tf - t0) / h
        m0, m1 = complex(self.mus[i]), complex(self.mus[i + 1])
        d0, d1 = complex(self.dmus[i]) * h, complex(self.dmus[i + 1]) * h
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        h01 = -2 * s**3 + 3 * s**2
        h11 = s**3 - s**2
        guess = h00 * m0 + h10 * d0 + h01 * m1 + h11 * d1
        lam = self.segment.point(t, self.params.prec)
        mu = newton_mu(lam, guess, self.params)
        limit = 0.3 * min(self.seps[i], self.seps[i + 1])
        if abs(complex(mu) - guess) <= limit:
            return mu
        roots = _float_branches(lam, self.params)
        d = sorted(abs(r - guess) for r in roots)
        if not d[0] < 0.3 * d[1]:
            raise ContinuationError("near-critical path: sheet ambiguous inside a tracked step")
        best = min(roots, key=lambda r: abs(r - guess))
        return newton_mu(lam, best, self.params)


def _separation(mu: complex, roots: np.ndarray) -> float:
    d = np.sort(np.abs(roots - mu))
    return float(d[1])


def track_segment(segment, mu0, params: SpectralParams, h_max: float = 1.0 / 32,
                  h_min: float = 1e-9, guard: float | None = None) -> Track:
    """Continue the root ``mu0`` of ``P(segment(0), .)`` along the segment.

    Predictor: Euler step along ``dmu/dlam = -P_lam / P_mu``.  Corrector: the
    nearest root at the new lambda, accepted only if it is much closer to the
    prediction than to any other root and the tracked root has not moved by
    more than half its distance to the next-nearest root; otherwise the step
    is halved.
    """
    prec = params.prec
    tr = Track(segment, params)
    lam = segment.point(prec.real(0) if prec.name == "extended" else 0.0, prec)
    mu = newton_mu(lam, mu0, params)
    if abs(complex(mu) - complex(mu0)) > 1e-6 * (1 + abs(complex(mu0))):
        raise ContinuationError("track start: anchor is not on the curve")
    bps = branch_points(params) if (guard and params.epsilon > 0) else []

    def push(t, lam, mu, roots):
        dl = segment.deriv(t, prec)
        tr.ts.append(float(t))
        tr.lams.append(lam)
        tr.mus.append(mu)
        tr.dmus.append(complex(dmu_dlam(lam, mu, params) * dl))
        tr.seps.append(_separation(complex(mu), roots))
        if bps:
            _check_guard(lam, mu, roots, bps, guard)

    push(0.0, lam, mu, _float_branches(lam, params))
    t = 0.0
    h = h_max
    while t < 1.0:
        h = min(h, 1.0 - t)
        t1 = t + h if t + h < 1.0 else 1.0
        tt = prec.real(t1) if prec.name == "extended" else t1
        lam1 = segment.point(tt, prec)
        roots = _float_branches(lam1, params)
        pred = complex(tr.mus[-1]) + tr.dmus[-1] * h
        dist = np.abs(roots - pred)
        j = int(np.argmin(dist))
        others = np.delete(roots, j)
        d_other = float(np.min(np.abs(others - roots[j])))
        moved = abs(roots[j] - complex(tr.mus[-1]))
        if dist[j] <= 0.2 * d_other and moved <= 0.5 * max(tr.seps[-1], d_other):
            mu1 = newton_mu(lam1, complex(roots[j]) if prec.name == "standard" else roots[j],
                            params)
            push(t1, lam1, mu1, roots)
            t = t1
            if dist[j] < 0.02 * d_other:
                h = min(2 * h, h_max)
        else:
            h /= 2
            if h < h_min:
                raise ContinuationError(
                    f"near-critical path: step underflow at lam={complex(lam1):.6g}")
    return tr


def _check_guard(lam, mu, roots, bps, guard):
    zl = complex(lam)
    zm = complex(mu)
    for b in bps:
        if abs(zl - complex(b.lam)) < guard:
            closest = np.argsort(np.abs(roots - complex(b.mu)))[:2]
            if np.min(np.abs(roots[closest] - zm)) < 1e-9 * (1 + abs(zm)):
                raise ContinuationError(
                    f"near-critical path: within {guard:.3g} of branch point "
                    f"{complex(b.lam):.6g} on a ramified sheet")


def continue_branch(start: CurvePoint, segment, params: SpectralParams) -> CurvePoint:
    """Endpoint of the analytic continuation of ``start`` along ``segment``."""
    if abs(complex(segment.point(0.0)) - complex(start.lam)) > 1e-9 * (1 + abs(complex(start.lam))):
        raise ValueError("segment does not start at the given point")
    if segment.length() == 0:
        return start
    guard = guard_radius(params) if params.epsilon > 0 else None
    return track_segment(segment, start.mu, params, guard=guard).end


def real_roots(lam: float, params: SpectralParams, tol: float = 1e-9):
    """Real mu-roots at a real lambda, ascending."""
    r = _float_branches(lam, params)
    scale = 1 + np.abs(r)
    return sorted(float(x.real) for x, s in zip(r, scale) if abs(x.imag) <= tol * s)
