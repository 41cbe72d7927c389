"""Adaptive Gauss-Legendre quadrature along parametrized paths."""
from __future__ import annotations

from .precision import STANDARD, Precision, gauss_legendre

ROUNDING_ULPS = 2048


class QuadratureError(ArithmeticError):
    """Raised when the subdivision cap is hit before ``tol`` is met."""

    def __init__(self, message, estimate, error):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


def _as_list(v):
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _panel(g, a, b, nodes, weights, mags=None):
    h = b - a
    acc = None
    for x, w in zip(nodes, weights):
        vals = _as_list(g(a + h * x))
        if acc is None:
            acc = [w * v for v in vals]
        else:
            for i, v in enumerate(vals):
                acc[i] += w * v
        if mags is not None:
            mags[0] = max(mags[0], max(float(abs(v)) for v in vals))
    return [h * v for v in acc]


def integrate_interval(g, a, b, tol, prec: Precision = STANDARD, order: int = 10,
                       max_panels: int = 20000):
    """Integrate ``g(t)`` over ``[a, b]``; ``g`` may return a list of values.

    A panel is accepted once the ``order``-point rule on the panel and the sum
    over its two halves agree to ``tol * (panel width) / (b - a)`` in every
    component, or to within rounding of the integrand size times the width; otherwise it is bisected.  Accepted panels are summed left to
    right, so the result does not depend on evaluation order.  Returns
    ``(value, error_estimate)``.
    """
    nodes, weights = gauss_legendre(order, prec.name)
    a = prec.real(a) if prec.name == "extended" else float(a)
    b = prec.real(b) if prec.name == "extended" else float(b)
    width = b - a
    scalar = not isinstance(g(a + width * nodes[0]), (list, tuple))
    whole = _panel(g, a, b, nodes, weights)
    stack = [(a, b, whole)]
    accepted = []
    panels = 0
    err_total = 0.0
    while stack:
        lo, hi, coarse = stack.pop()
        mid = (lo + hi) / 2
        mags = [0.0]
        left = _panel(g, lo, mid, nodes, weights, mags)
        right = _panel(g, mid, hi, nodes, weights, mags)
        fine = [u + v for u, v in zip(left, right)]
        err = max(float(abs(f - c)) for f, c in zip(fine, coarse))
        panels += 1
        local_tol = float(tol * (hi - lo) / width)
        # rounding floor in ulps of (largest integrand value) * width; near
        # nodes the integrand itself is only known to ~1e2 ulps
        floor = ROUNDING_ULPS * prec.eps * mags[0] * float(hi - lo)
        if err <= max(local_tol, floor) or hi - lo <= width * 2.0**-60:
            accepted.append((lo, fine))
            err_total += err
        elif panels >= max_panels:
            accepted.append((lo, fine))
            accepted.extend((s[0], s[2]) for s in stack)
            est = _sum_sorted(accepted)
            raise QuadratureError(
                f"adaptive Gauss: subdivision cap {max_panels} reached (error ~{err:.2e})",
                est[0] if scalar else est, err)
        else:
            stack.append((mid, hi, right))
            stack.append((lo, mid, left))
    total = _sum_sorted(accepted)
    return (total[0] if scalar else total), err_total


def _sum_sorted(accepted):
    accepted.sort(key=lambda item: item[0])
    total = None
    for _, vals in accepted:
        if total is None:
            total = list(vals)
        else:
            for i, v in enumerate(vals):
                total[i] += v
    return total


def adaptive_gauss(integrand, segment, tol, prec: Precision = STANDARD, order: int = 10,
                   max_panels: int = 20000):
    """``integral of integrand(lambda) dlambda`` along ``segment``.

    Returns ``(value, error_estimate)``.
    """

    def g(t):
        lam = segment.point(t, prec)
        dl = segment.deriv(t, prec)
        v = integrand(lam)
        if isinstance(v, (list, tuple)):
            return [x * dl for x in v]
        return v * dl

    return integrate_interval(g, 0, 1, tol, prec, order, max_panels)
