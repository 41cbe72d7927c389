"""Multi-line KP-II solitons from totally nonnegative Grassmannian data.

Phases are ``theta_j = kappa_j x + kappa_j**2 y + kappa_j**3 t`` and the heat
hierarchy solutions are ``f_i = sum_j A_ij exp(theta_j)``.  The tau function
is their x-Wronskian; by Cauchy-Binet

    tau = sum_J Delta_J(A) prod_{r<s} (kappa_{j_s} - kappa_{j_r}) exp(theta_J)

with ``theta_J`` the sum of the phases in J.  Every term is nonnegative for
TNN data, so tau is evaluated as a log-sum-exp with the largest phase shifted
out.  ``u = 2 d_x^2 log tau`` is taken from the exact Taylor jet of that sum.

The divisor code below is specific to Gr^TP(2,4) with weights
(w13, w23, w14, w24).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .numerics.jets import Jet3, jet_log
from .theta import MAX_ORDERS, kp_residual_from_log_jet

DEFAULT_KAPPA = (-1.5, -0.75, 0.5, 2.0)
FINITE_OVALS = ("b1", "b2", "b3", "b4")


class WronskianError(ArithmeticError):
    pass


class BadTimeError(ArithmeticError):
    """A divisor formula has a vanishing denominator at the chosen t0."""


class NonGenericDivisorError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# data


def rref_from_weights(w13, w23, w14, w24) -> np.ndarray:
    w = (w13, w23, w14, w24)
    if any(not (float(v) > 0) for v in w):
        raise ValueError(f"weights must be positive, got {w}")
    return np.array([[1.0, 0.0, -w13, -w13 * (w14 + w24)],
                     [0.0, 1.0, w23, w23 * w24]])


def minors(A) -> dict[tuple[int, ...], float]:
    """All maximal minors, keyed by 1-based column tuples in lexicographic order."""
    A = np.asarray(A, dtype=float)
    k, n = A.shape
    return {tuple(j + 1 for j in J): float(np.linalg.det(A[:, list(J)]))
            for J in itertools.combinations(range(n), k)}


@dataclass(frozen=True)
class SolitonData:
    kappa: tuple
    A: np.ndarray = field(compare=False)
    weights: tuple | None = None

    def __post_init__(self):
        k = tuple(float(v) for v in self.kappa)
        object.__setattr__(self, "kappa", k)
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        object.__setattr__(self, "A", A)
        if any(b <= a for a, b in zip(k, k[1:])):
            raise ValueError(f"kappa must be strictly increasing, got {k}")
        if A.shape[1] != len(k) or A.shape[0] > len(k):
            raise ValueError(f"A has shape {A.shape}, incompatible with {len(k)} phases")
        scale = max(1.0, float(np.max(np.abs(A)))) ** A.shape[0]
        bad = {J: d for J, d in minors(A).items() if d < -1e-12 * scale}
        if bad:
            raise ValueError(f"data is not totally nonnegative: negative minors {bad}")

    @classmethod
    def from_weights(cls, w13, w23, w14, w24, kappa=DEFAULT_KAPPA) -> "SolitonData":
        return cls(tuple(kappa), rref_from_weights(w13, w23, w14, w24), (w13, w23, w14, w24))

    @property
    def k(self) -> int:
        return self.A.shape[0]

    @property
    def n(self) -> int:
        return self.A.shape[1]

    def is_totally_positive(self) -> bool:
        return all(d > 0 for d in minors(self.A).values())

    def with_matrix(self, A) -> "SolitonData":
        return SolitonData(self.kappa, A, None)


def phases(x, y, t, kappa):
    """theta_j at (x, y, t); trailing axis runs over j."""
    kap = np.asarray(kappa, dtype=float)
    x, y, t = (np.asarray(v, dtype=float)[..., None] for v in (x, y, t))
    return kap * x + kap ** 2 * y + kap ** 3 * t


def _terms(data: SolitonData):
    """(column sets, tau coefficients, rates K_J) for the minor sum."""
    kap = np.asarray(data.kappa)
    sets, coef = [], []
    for J, d in minors(data.A).items():
        idx = [j - 1 for j in J]
        van = np.prod([kap[s] - kap[r] for r, s in itertools.combinations(idx, 2)])
        sets.append(idx)
        coef.append(d * van)
    coef = np.array(coef)
    rates = np.array([[np.sum(kap[idx] ** p) for p in (1, 2, 3)] for idx in sets])
    return sets, coef, rates


def _log_weights(x, y, t, data):
    """log of each tau term minus the common shift M, and M itself."""
    sets, coef, rates = _terms(data)
    keep = coef > 0
    x, y, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (x, y, t)))
    big = rates[keep, 0][:, None] * x.ravel() + rates[keep, 1][:, None] * y.ravel() \
        + rates[keep, 2][:, None] * t.ravel()
    big = big + np.log(coef[keep])[:, None]
    M = np.max(big, axis=0)
    return big - M, M, rates[keep], x.shape


def log_tau(x, y, t, data: SolitonData):
    """log tau by the minor sum, shifted by the largest term (no overflow)."""
    lw, M, _, shape = _log_weights(x, y, t, data)
    out = (M + np.log(np.sum(np.exp(lw), axis=0))).reshape(shape)
    return out if out.ndim else float(out)


def tau(x, y, t, data: SolitonData):
    return np.exp(log_tau(x, y, t, data))


def log_tau_wronskian(x, y, t, data: SolitonData):
    """log Wr_x(f_1..f_k) from ``det(A diag(exp(theta - M)) V)``.

    Columns of V are the Newton basis ``prod_{s<m} (kappa_j - kappa_{p_s})``
    rather than plain powers (a unipotent change, same determinant).  The
    nodes p_s are the dominant phases picked greedily, so the leading
    exponentials drop out of the later columns instead of cancelling there.
    The shift M is the largest phase; it comes back as ``k M``.
    """
    th = phases(x, y, t, data.kappa)
    shape = th.shape[:-1]
    th = th.reshape(-1, data.n)
    k = data.k
    kap = np.asarray(data.kappa)
    col = np.max(np.abs(data.A), axis=0)
    out = np.empty(len(th))
    for p, row in enumerate(th):
        M = np.max(row)
        E = np.exp(row - M)
        V = np.ones((data.n, k))
        size = E * col
        for m in range(1, k):
            piv = int(np.argmax(size))
            V[:, m] = V[:, m - 1] * (kap - kap[piv])
            size = size * np.abs(kap - kap[piv])
        sign, logdet = np.linalg.slogdet(data.A @ (E[:, None] * V))
        if sign <= 0:
            raise WronskianError(f"Wronskian is not positive at point {p}")
        out[p] = logdet + k * M
    out = out.reshape(shape)
    return out if out.ndim else float(out)


def log_tau_jet(x, y, t, data: SolitonData, orders=(2, 0, 0)) -> Jet3:
    """Exact jet of log tau: tau is a positive sum of exponentials of linear forms."""
    lw, M, rates, shape = _log_weights(x, y, t, data)
    w = np.exp(lw)
    nx, ny, nt = orders
    c = np.empty((nx + 1, ny + 1, nt + 1, w.shape[1]), dtype=complex)
    for a in range(nx + 1):
        for b in range(ny + 1):
            for d in range(nt + 1):
                mono = (rates[:, 0] ** a * rates[:, 1] ** b * rates[:, 2] ** d
                        / (factorial(a) * factorial(b) * factorial(d)))
                c[a, b, d] = mono @ w
    j = jet_log(Jet3(c)) + M
    if not shape:
        return Jet3(j.coeffs[..., 0])
    return Jet3(j.coeffs.reshape(j.coeffs.shape[:3] + shape))


def u_soliton(x, y, t, data: SolitonData):
    j = log_tau_jet(x, y, t, data, (2, 0, 0))
    u = np.real(2 * j.derivative_value(2, 0, 0))
    return u if np.ndim(u) else float(u)


def kp_residual_soliton(x, y, t, data: SolitonData):
    """Relative KP-II residual of u_soliton (same assembler as the theta side)."""
    F = log_tau_jet(x, y, t, data, MAX_ORDERS)
    res, scale = kp_residual_from_log_jet(F, 0.0)
    out = np.abs(res) / scale
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------------------
# Darboux operator


@dataclass(frozen=True)
class DarbouxOperator:
    """``d_x^k - w_1 d_x^{k-1} - ... - w_k`` at time ``t``."""

    w: tuple
    t: tuple
    residual: float = 0.0

    @property
    def k(self) -> int:
        return len(self.w)


def _f_derivatives(t, data: SolitonData, upto: int):
    """(k, upto+1) array of d_x^m f_i at t, all scaled by exp(-max phase)."""
    th = phases(*t, data.kappa)
    E = np.exp(th - np.max(th))
    V = np.vander(np.asarray(data.kappa), upto + 1, increasing=True)
    return data.A @ (E[:, None] * V)


def darboux_coeffs(t, data: SolitonData, tol: float = 1e-10) -> DarbouxOperator:
    """Coefficients of the operator annihilating every f_i at ``t``.

    The system ``d^k f_i = sum_m w_m d^{k-m} f_i`` is solved by Cramer's rule
    with both determinants expanded by Cauchy-Binet over column sets J, so
    they are sums of ``Delta_J exp(theta_J)`` times small Vandermonde-type
    determinants.  The denominator is the Wronskian, whose terms all have
    one sign; nothing cancels even when one exponential dominates every f_i.
    """
    t = tuple(float(v) for v in t)
    k = data.k
    kap = np.asarray(data.kappa)
    th = phases(*t, data.kappa)
    pows = [k - m for m in range(1, k + 1)]
    logs, dets = [], []
    for J, d in minors(data.A).items():
        if d == 0:
            continue
        idx = [j - 1 for j in J]
        V = kap[idx][:, None] ** np.array(pows)[None, :]
        row = [np.linalg.det(V)]
        for m in range(k):
            Vm = V.copy()
            Vm[:, m] = kap[idx] ** k
            row.append(np.linalg.det(Vm))
        logs.append(math.log(abs(d)) + float(np.sum(th[idx])))
        dets.append(math.copysign(1.0, d) * np.array(row))
    if not logs:
        raise WronskianError(f"Wronskian zero at t = {t}")
    logs = np.array(logs)
    tot = np.exp(logs - np.max(logs)) @ np.array(dets)
    den = tot[0]
    if not abs(den) > 1e-300:
        raise WronskianError(f"Wronskian zero at t = {t}")
    w = tot[1:] / den
    D = _f_derivatives(t, data, k)
    lhs = D[:, [k - m for m in range(1, k + 1)]]
    rhs = D[:, k]
    rows = np.max(np.abs(D), axis=1) * (1 + float(np.sum(np.abs(w))))
    live = rows > 0
    res = float(np.max(np.abs(rhs - lhs @ w)[live] / rows[live])) if live.any() else 0.0
    if res > tol:
        raise WronskianError(f"Darboux system residual {res:.3g} at t = {t}")
    return DarbouxOperator(tuple(float(v) for v in w), t, res)


def symbol(zeta, op: DarbouxOperator):
    """``zeta^k - w_1 zeta^{k-1} - ... - w_k``."""
    acc = 1.0
    for wm in op.w:
        acc = acc * zeta - wm
    return acc


def dressed_exponential(zeta, t, op: DarbouxOperator):
    x, y, tt = t
    return symbol(zeta, op) * np.exp(zeta * x + zeta ** 2 * y + zeta ** 3 * tt)


def dressed_phase(l: int, t, data: SolitonData, t_op=None):
    """``D e^{theta_l}`` at t, with D built at ``t_op`` (default: t itself)."""
    op = darboux_coeffs(t if t_op is None else t_op, data)
    return dressed_exponential(data.kappa[l - 1], t, op)


def _dressed_log_parts(t, data: SolitonData):
    """``tau * D e^{theta_l} = m_l exp(s_l)`` for every l, plus log tau.

    Both Wronskians in ``D e^{theta_l} = Wr(f_1..f_k, e^{theta_l}) / Wr(f_1..f_k)``
    expand over column sets J with exact terms; each l keeps its own shift
    s_l, so the sign and the relative size survive even when the values
    are far below the double range.
    """
    kap = np.asarray(data.kappa)
    th = phases(*t, data.kappa)
    logs = {l: [] for l in range(data.n)}
    sgns = {l: [] for l in range(data.n)}
    for J, d in minors(data.A).items():
        if d == 0:
            continue
        idx = [j - 1 for j in J]
        van = np.prod([kap[b] - kap[a] for a, b in itertools.combinations(idx, 2)])
        base = math.log(abs(d * van)) + float(np.sum(th[idx]))
        for l in range(data.n):
            if l in idx:
                continue
            prod = float(np.prod(kap[l] - kap[idx]))
            logs[l].append(base + math.log(abs(prod)) + float(th[l]))
            sgns[l].append(math.copysign(1.0, d * van * prod))
    m, sh = np.zeros(data.n), np.full(data.n, -math.inf)
    for l in range(data.n):
        if logs[l]:
            L = np.array(logs[l])
            sh[l] = float(np.max(L))
            m[l] = float(np.array(sgns[l]) @ np.exp(L - sh[l]))
    lt = log_tau(*t, data)
    return m, sh, lt


def symbol_at_phases(t, data: SolitonData) -> np.ndarray:
    """``symbol(kappa_l)`` for every l, from the Cauchy-Binet expansion."""
    m, sh, lt = _dressed_log_parts(t, data)
    th = phases(*t, data.kappa)
    with np.errstate(under="ignore"):
        return m * np.exp(sh - th - lt)


def sato_roots(op: DarbouxOperator) -> np.ndarray:
    """Roots of the operator symbol, ascending (the Sato divisor on Gamma0)."""
    return np.sort_complex(np.roots([1.0] + [-w for w in op.w]))


def psi_hat(l: int, t, t0, data: SolitonData):
    num = dressed_phase(l, t, data)
    den = dressed_phase(l, t0, data)
    if den == 0:
        raise BadTimeError(f"D e^theta_{l} vanishes at t0 = {tuple(t0)}")
    return num / den


# ---------------------------------------------------------------------------
# Gr^TP(2,4) divisor


# where each divisor point sits, per configuration (signs of D e^theta_2,
# D e^theta_3 at t0)
CONFIGURATIONS = {
    (-1, +1): "I",
    (-1, -1): "II",
    (+1, -1): "III",
}
OVAL_TABLE = {
    "I": {"P1": "b1", "P2": "b2", "P23": "b3", "P13": "b4"},
    "II": {"P1": "b1", "P2": "b3", "P13": "b4", "P23": "b2"},
    "III": {"P1": "b2", "P2": "b3", "P13": "b1", "P23": "b4"},
}


def _oval_on_gamma0(gamma, kappa):
    k1, k2, k3, k4 = kappa
    if k1 < gamma < k2:
        return "b1"
    if k2 < gamma < k3:
        return "b2"
    if k3 < gamma < k4:
        return "b3"
    return "Omega0"


def _sato_ovals(sym, sato, kappa):
    """Ovals of the two Sato points from the sign changes of the symbol at
    the phases (the monic quadratic is negative exactly between its roots);
    falls back to the root values when there is no clean pattern."""
    s = np.sign(sym)
    down = [l for l in range(3) if s[l] > 0 > s[l + 1]]
    up = [l for l in range(3) if s[l] < 0 < s[l + 1]]
    if len(down) == 1 and len(up) == 1 and down[0] < up[0]:
        return f"b{down[0] + 1}", f"b{up[0] + 1}"
    return _oval_on_gamma0(sato[0], kappa), _oval_on_gamma0(sato[1], kappa)


def _oval_on_component(component, zeta):
    """Real ovals crossed by Gamma13 / Gamma23, by the local coordinate."""
    if component == "Gamma13":
        arcs = ("Omega0", "b4", "b1")
    elif component == "Gamma23":
        arcs = ("b4", "b3", "b2")
    else:
        raise ValueError(f"unknown component {component!r}")
    if zeta < 0:
        return arcs[0]
    if zeta < 1:
        return arcs[1]
    return arcs[2]


@dataclass(frozen=True)
class KPDivisor:
    sato: tuple
    gamma13: float
    gamma23: float
    configuration: str
    oval_assignment: dict
    t0: tuple
    signs: tuple

    def one_per_oval(self) -> bool:
        placed = sorted(self.oval_assignment.values())
        return placed == list(FINITE_OVALS)

    def matches_table(self) -> bool:
        return self.oval_assignment == OVAL_TABLE[self.configuration]


def divisor(t0, data: SolitonData) -> KPDivisor:
    if data.k != 2 or data.n != 4 or data.weights is None:
        raise ValueError("the divisor is implemented for Gr^TP(2,4) weight data only")
    t0 = tuple(float(v) for v in t0)
    w13, w23, w14, w24 = data.weights
    try:
        op = darboux_coeffs(t0, data)
    except WronskianError as exc:
        raise BadTimeError(f"bad t0 = {t0}, retry with shifted t0: {exc}") from exc
    m, sh, _ = _dressed_log_parts(t0, data)
    # tau > 0, so m carries the sign of D e^theta_l.  D kills both rows of
    # the RREF data, hence
    #   D e^theta_3 + (w14+w24) D e^theta_4 =  D e^theta_1 / w13
    #   D e^theta_3 + w24 D e^theta_4       = -D e^theta_2 / w23
    # and the two denominators are evaluated without cancellation.
    for name, l in (("D e^theta_3 + (w14+w24) D e^theta_4", 0),
                    ("D e^theta_3 + w24 D e^theta_4", 1)):
        if m[l] == 0 or not math.isfinite(sh[l]):
            raise BadTimeError(f"bad t0 = {t0}, retry with shifted t0: {name} vanishes")
    disc = op.w[0] ** 2 + 4 * op.w[1]
    if disc < 0:
        raise ArithmeticError(f"Sato roots are complex at t0 = {t0} (discriminant {disc:.3g})")
    r = math.sqrt(disc)
    sato = ((op.w[0] - r) / 2, (op.w[0] + r) / 2)
    if np.any(m == 0):
        raise NonGenericDivisorError(f"non-generic divisor: a Sato root sits on a phase "
                                     f"at t0 = {t0}")
    signs = tuple(1 if v > 0 else -1 for v in (m[1], m[2]))
    if signs not in CONFIGURATIONS:
        raise NonGenericDivisorError(
            f"non-generic divisor: signs of (D e^theta_2, D e^theta_3) are {signs}")
    p1, p2 = _sato_ovals(m, sato, data.kappa)
    g13 = w13 * w14 * (m[3] / m[0]) * math.exp(sh[3] - sh[0])
    g23 = -w23 * w24 * (m[3] / m[1]) * math.exp(sh[3] - sh[1])
    assign = {
        "P1": p1,
        "P2": p2,
        "P13": _oval_on_component("Gamma13", g13),
        "P23": _oval_on_component("Gamma23", g23),
    }
    return KPDivisor(sato, float(g13), float(g23), CONFIGURATIONS[signs], assign, t0, signs)


def divisor_with_retry(data: SolitonData, t0=(0.0, 0.0, 0.0), delta: float = 1e-3,
                       attempts: int = 20) -> KPDivisor:
    """:func:`divisor` at t0, then at t0 + (delta 2^m, 0, 0) until it succeeds."""
    try:
        return divisor(t0, data)
    except (BadTimeError, NonGenericDivisorError) as first:
        err = first
    for m in range(attempts):
        shifted = (t0[0] + delta * 2.0 ** m, t0[1], t0[2])
        try:
            return divisor(shifted, data)
        except (BadTimeError, NonGenericDivisorError) as exc:
            err = exc
    raise err


def _marked_images(component, kappa):
    """lambda at zeta = 0, 1, infinity on the component, from the line equations."""
    k1, k2, k3, k4 = kappa
    if component == "Gamma13":
        return (k1 + k4) / 2, (k1 + k2) / 2, k1
    if component == "Gamma23":
        return (k3 + k4) / 2, k3, (k2 + k3) / 2
    raise ValueError(f"unknown component {component!r}")


def lambda_from_zeta(component: str, zeta, kappa=DEFAULT_KAPPA):
    """Moebius map zeta -> lambda fixed by the three marked points.

    ``lambda = (L_inf s zeta + L_0) / (s zeta + 1)`` with
    ``s = (L_1 - L_0) / (L_inf - L_1)``.
    """
    L0, L1, Linf = _marked_images(component, kappa)
    s = (L1 - L0) / (Linf - L1)
    if math.isinf(zeta):
        return Linf
    den = s * zeta + 1
    if abs(den) <= 1e-14 * max(1.0, abs(s * zeta)):
        raise ZeroDivisionError(f"zeta = {zeta} is the pole of the {component} coordinate")
    return (Linf * s * zeta + L0) / den
