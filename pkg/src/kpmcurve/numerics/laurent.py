"""Laurent coefficients by uniform sampling on a circle (trapezoid rule = DFT)."""
from __future__ import annotations

from .precision import STANDARD, Precision


def laurent_coefficients(f, center, radius, orders, prec: Precision = STANDARD,
                         samples: int | None = None, values=None):
    """Coefficients ``c_m`` of ``f(z) = sum_m c_m (z - center)**m`` for m in ``orders``.

    ``f`` must be analytic on an annulus containing ``|z - center| = radius``.
    The default sample count is ``8 * (max|m| + 1)``; fewer than
    ``4 * (max|m| + 1)`` samples is refused because aliasing of neighbouring
    orders would no longer be controlled.  Pre-computed samples on the
    circle may be passed as ``values`` (angles ``2 pi k / samples``).
    Returns a dict ``{m: c_m}``.
    """
    orders = list(orders)
    top = max(abs(m) for m in orders)
    n = samples if samples is not None else 8 * (top + 1)
    if n < 4 * (top + 1):
        raise ValueError(f"order {top} needs at least {4 * (top + 1)} samples, got {n}")
    units = [prec.cis(2 * prec.pi * k / n) for k in range(n)]
    if values is None:
        values = [f(center + radius * u) for u in units]
    out = {}
    for m in orders:
        acc = 0
        rm = prec.scalar(radius) ** (-m)
        for k in range(n):
            # u**(-m) via index arithmetic keeps the phase exact
            acc += values[k] * units[(-m * k) % n]
        out[m] = acc * rm / n
    return out


def circle_points(center, radius, samples: int, prec: Precision = STANDARD):
    return [center + radius * prec.cis(2 * prec.pi * k / samples) for k in range(samples)]
