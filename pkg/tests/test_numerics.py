import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kpmcurve.curve import p0_branch
from kpmcurve.numerics import (
    EXTENDED,
    STANDARD,
    ArcSegment,
    Jet3,
    LineSegment,
    QuadratureError,
    adaptive_gauss,
    circle,
    integrate_interval,
    jet_derivative,
    jet_exp,
    jet_log,
    jet_mul,
    jet_reciprocal,
    laurent_coefficients,
    poly_from_roots,
    solve_polynomial,
)
from kpmcurve.numerics.roots import horner
from kpmcurve.periods import differential_values

coef = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


# polynomial roots

def test_quadratic_roots():
    r = sorted(z.real for z in solve_polynomial([-1, 0, 1]))
    assert r == pytest.approx([-1, 1], abs=1e-15)


def test_nodal_quintic_at_zero():
    # P at lam = 0, eps = 0: mu (mu - 1.5)(mu + 0.75)(mu + 0.5)(mu - 2)
    c = poly_from_roots([0.0, 1.5, -0.75, -0.5, 2.0])
    r = sorted(z.real for z in solve_polynomial(c))
    assert r == pytest.approx([-0.75, -0.5, 0.0, 1.5, 2.0], abs=1e-13)


def test_degree_zero_rejected():
    with pytest.raises(ValueError):
        solve_polynomial([3.0])
    with pytest.raises(ValueError):
        solve_polynomial([1.0, 2.0, 0.0])


@settings(max_examples=40, deadline=None)
@given(st.lists(coef, min_size=6, max_size=6).filter(lambda c: abs(c[-1]) > 0.1))
def test_roots_residual_and_vieta(c):
    roots = solve_polynomial(c)
    scale = sum(abs(v) * max(1, max(abs(r) for r in roots)) ** i for i, v in enumerate(c))
    for r in roots:
        assert abs(horner([complex(v) for v in c], r)[0]) < 1e-10 * scale
    d = len(c) - 1
    assert abs(sum(roots) + c[d - 1] / c[d]) < 1e-9 * (1 + abs(c[d - 1] / c[d]))
    prod = np.prod(roots)
    assert abs(prod - (-1) ** d * c[0] / c[d]) < 1e-9 * (1 + abs(c[0] / c[d]))
    back = np.array(poly_from_roots(roots)) * c[d]
    assert np.max(np.abs(back - np.array(c))) < 1e-8 * max(1, max(map(abs, c)))


def test_extended_roots_are_tighter():
    near = EXTENDED.scalar(1) + EXTENDED.real("1e-8")
    c = poly_from_roots([EXTENDED.scalar(1), near, EXTENDED.scalar(2), EXTENDED.scalar(3)])
    roots = sorted(solve_polynomial(c, EXTENDED), key=lambda z: float(z.real))
    assert float(abs(roots[1] - near)) < 1e-24


# quadrature

def test_constant_integral():
    v, _ = adaptive_gauss(lambda z: 1.0, LineSegment(0j, 1 + 0j), 1e-14)
    assert v == pytest.approx(1.0, abs=1e-15)


def test_dz_over_z_on_circle():
    total = sum(adaptive_gauss(lambda z: 1 / z, seg, 1e-13)[0] for seg in circle(0j, 1.0))
    assert abs(total - 2j * math.pi) < 1e-12


def test_dz_over_z_extended():
    total = sum((adaptive_gauss(lambda z: 1 / z, seg, 1e-28, EXTENDED, order=20)[0]
                 for seg in circle(0j, 1.0)), EXTENDED.scalar(0))
    assert float(abs(total - 2j * EXTENDED.pi)) < 1e-28


def test_additive_and_orientation():
    f = lambda z: cmath.exp(z) * z
    a, b, c = 0.1 + 0.2j, 1.0 - 0.4j, 1.7 + 0.9j
    whole = adaptive_gauss(f, LineSegment(a, c), 1e-13)[0]
    parts = adaptive_gauss(f, LineSegment(a, b), 1e-13)[0] + adaptive_gauss(f, LineSegment(b, c), 1e-13)[0]
    exact = (c - 1) * cmath.exp(c) - (a - 1) * cmath.exp(a)
    assert abs(whole - exact) < 1e-12
    assert abs(parts - exact) < 1e-12
    back = adaptive_gauss(f, LineSegment(c, a), 1e-13)[0]
    assert abs(back + whole) < 1e-12


def test_sigma1_on_oval_run_matches_trapezoid(params):
    # real run of b1 between the axis nodes, on the Gamma0 sheet
    from kpmcurve.curve import newton_mu, track_segment

    seg = LineSegment(-1.3 + 0j, -1.0 + 0j)
    tr = track_segment(seg, newton_mu(-1.3, 0.0, params), params)

    def g(t):
        lam = seg.point(t)
        return differential_values(lam, tr.mu_at(t), params)[0] * seg.deriv(t)

    v, _ = integrate_interval(g, 0, 1, 1e-13)
    n = 20000
    ts = np.linspace(0, 1, n + 1)
    ys = np.array([g(t) for t in ts])
    trap = (ys.sum() - 0.5 * (ys[0] + ys[-1])) / n
    assert abs(v - trap) < 1e-8 * max(1, abs(v))


def test_cap_error_carries_estimate():
    # oscillation that cannot be resolved with a tiny panel budget
    with pytest.raises(QuadratureError) as exc:
        integrate_interval(lambda t: cmath.exp(400j * t), 0, 1, 1e-15, max_panels=3)
    assert exc.value.estimate is not None and exc.value.error > 0


# Laurent coefficients

def test_laurent_simple():
    c = laurent_coefficients(lambda z: 1 / z, 0, 1.0, range(-3, 3))
    assert abs(c[-1] - 1) < 1e-15
    assert max(abs(c[m]) for m in c if m != -1) < 1e-15


def test_laurent_polynomial_exact():
    c = laurent_coefficients(lambda z: z + 2 / z ** 3, 0, 1.5, range(-4, 3))
    assert abs(c[1] - 1) < 1e-14 and abs(c[-3] - 2) < 1e-14
    assert max(abs(c[m]) for m in c if m not in (1, -3)) < 1e-14


def test_laurent_refuses_aliasing():
    with pytest.raises(ValueError):
        laurent_coefficients(lambda z: z, 0, 1.0, (-3,), samples=8)


def test_sigma1_expansion_at_p0(params):
    k1, k2, k3, k4 = params.kappa
    R = params.radius_far

    def f(lam):
        return differential_values(lam, p0_branch(lam, params), params)[4]

    c = laurent_coefficients(f, 0, R, range(-7, 1), samples=64)
    assert abs(c[0] - 1) < 1e-12
    assert abs(c[-1]) < 1e-12
    lead = params.epsilon * params.beta ** 2 * (k2 + k4 - k1 - k3)
    assert abs(c[-6] - lead) < 1e-2 * abs(lead)


# jets

def _rand_jet(rng, orders=(4, 2, 1), c0=1.3):
    c = rng.normal(size=tuple(o + 1 for o in orders)) * 0.3 + 0j
    c[0, 0, 0] = c0
    return Jet3(c)


def test_jet_log_constant():
    j = jet_log(Jet3.constant_jet(2.5, (3, 1, 1)))
    assert abs(j.constant - math.log(2.5)) < 1e-15
    assert np.max(np.abs(j.coeffs.ravel()[1:])) == 0


def test_log_exp_inverse():
    rng = np.random.default_rng(3)
    j = _rand_jet(rng)
    back = jet_log(jet_exp(j))
    assert np.max(np.abs(back.coeffs - j.coeffs)) < 1e-12


def test_log_derivative_identity():
    rng = np.random.default_rng(5)
    j = _rand_jet(rng)
    lhs = jet_derivative(jet_log(j), 0)
    rhs = jet_mul(jet_derivative(j, 0), jet_reciprocal(Jet3(j.coeffs[:-1])))
    assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) < 1e-12


def test_jet_log_zero_constant():
    with pytest.raises(ZeroDivisionError):
        jet_log(Jet3.constant_jet(0.0, (2, 0, 0)))


def test_arc_junctions_exact_in_extended():
    pieces = circle(0.3 + 0j, 0.01, math.pi, 4)
    for a, b in zip(pieces, pieces[1:] + pieces[:1]):
        assert a.w(1, EXTENDED) == b.w(0, EXTENDED)
    # derivative matches the parametrization to working precision
    arc = ArcSegment(0j, 2.0, 0.3, 1.1)
    h = EXTENDED.real("1e-12")
    fd = (arc.w(0.5 + h, EXTENDED) - arc.w(0.5 - h, EXTENDED)) / (2 * h)
    assert float(abs(fd - arc.dw(0.5, EXTENDED))) < 1e-18


def test_cispi_exact_standard():
    assert STANDARD.cispi(1.0) == -1 and STANDARD.cispi(1.5) == -1j
