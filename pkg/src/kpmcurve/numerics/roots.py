"""Polynomial roots: companion-matrix eigenvalues followed by Aberth polishing."""
from __future__ import annotations

import numpy as np

from .precision import STANDARD, Precision


class RootFindingError(ArithmeticError):
    """Raised when polishing does not reach the residual target.

    ``partial_roots`` holds the best approximations found.
    """

    def __init__(self, message, partial_roots):
        super().__init__(message)
        self.partial_roots = partial_roots


def horner(coeffs, x):
    """Value and derivative of ``sum(coeffs[i] * x**i)``."""
    p = coeffs[-1]
    dp = 0 * p
    for c in reversed(coeffs[:-1]):
        dp = dp * x + p
        p = p * x + c
    return p, dp


def solve_polynomial(coeffs, prec: Precision = STANDARD, max_iter: int = 40):
    """All roots of ``c[0] + c[1] x + ... + c[d] x**d`` with multiplicity.

    Coefficients are in ascending order.  Starting values come from the
    eigenvalues of the companion matrix in double precision; the roots are
    then refined together by Aberth iteration in the working precision,
    which keeps clustered roots apart.
    """
    coeffs = [prec.scalar(c) for c in coeffs]
    d = len(coeffs) - 1
    if d < 1:
        raise ValueError("solve_polynomial needs degree >= 1")
    if coeffs[-1] == 0:
        raise ValueError("leading coefficient must be nonzero")
    if d == 1:
        return [-coeffs[0] / coeffs[1]]
    start = np.roots([complex(c) for c in reversed(coeffs)])
    z = [prec.scalar(complex(r)) for r in start]
    abs_c = [abs(c) for c in coeffs]
    tol = 64 * prec.eps

    def scale_at(x):
        ax = abs(x)
        s = abs_c[-1]
        for c in reversed(abs_c[:-1]):
            s = s * ax + c
        return s

    def norm_at(x):
        """Backward-error scale sum |c_i| max(1, |x|)**i."""
        ax = max(abs(x), 1)
        s = abs_c[-1]
        for c in reversed(abs_c[:-1]):
            s = s * ax + c
        return s

    for _ in range(max_iter):
        done = True
        for i in range(d):
            p, dp = horner(coeffs, z[i])
            if abs(p) <= tol * scale_at(z[i]):
                continue
            done = False
            if dp == 0:
                z[i] += prec.scalar(complex(tol, tol)) * (1 + abs(z[i]))
                continue
            ratio = p / dp
            s = 0
            for j in range(d):
                if j != i:
                    diff = z[i] - z[j]
                    if diff != 0:
                        s += 1 / diff
            denom = 1 - ratio * s
            cand = z[i] - (ratio / denom if denom != 0 else ratio)
            # a root already acceptable on the backward-error scale keeps its
            # place unless the step lowers |p|: in a tight cluster at a
            # near-multiple root the steps only scatter it
            if abs(p) > tol * norm_at(z[i]) or abs(horner(coeffs, cand)[0]) < abs(p):
                z[i] = cand
        if done:
            return z
    # accept on the backward-error scale: tight clusters near zero cannot
    # meet the pointwise target within the cap
    worst = max(abs(horner(coeffs, r)[0]) / norm_at(r) for r in z)
    if worst <= 1e3 * tol:
        return z
    raise RootFindingError(f"root polishing did not converge (residual {float(worst):.3e})", z)


def poly_from_roots(roots):
    """Ascending coefficients of ``prod(x - r)``."""
    c = [1 + 0 * roots[0]] if roots else [1]
    for r in roots:
        nxt = [0 * c[0]] * (len(c) + 1)
        for i, ci in enumerate(c):
            nxt[i + 1] += ci
            nxt[i] -= r * ci
        c = nxt
    return c
