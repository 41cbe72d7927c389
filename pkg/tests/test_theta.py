import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kpmcurve.theta import (
    FingapSolution,
    ThetaContext,
    ThetaTruncationError,
    kp_residual_fingap,
    log_theta_jet,
    theta,
    u_fingap,
)

THETA_AT_I = 1.086434811213308


def test_genus_one_value_at_i():
    ctx = ThetaContext.build([[1j]])
    assert abs(theta([0.0], ctx) - THETA_AT_I) < 1e-12
    # independent scalar series
    oracle = float(mpmath.jtheta(3, 0, mpmath.exp(-mpmath.pi)))
    assert abs(theta([0.0], ctx) - oracle) < 1e-14


def test_genus_one_shifted_argument():
    ctx = ThetaContext.build([[1j]])
    z = 0.3 + 0.2j
    q = mpmath.exp(-mpmath.pi)
    oracle = complex(mpmath.jtheta(3, mpmath.pi * z, q))
    assert abs(theta([z], ctx) - oracle) < 1e-13


@pytest.fixture(scope="module")
def ctx(rd):
    return ThetaContext.build(rd.B_np())


def _z(rng, g=4):
    return rng.normal(size=g) + 1j * rng.normal(size=g) * 0.3


def test_even(ctx):
    z = _z(np.random.default_rng(1))
    assert abs(theta(z, ctx) - theta(-z, ctx)) < 1e-12 * abs(theta(z, ctx))


def test_integer_periods(ctx):
    z = _z(np.random.default_rng(2))
    for k in range(4):
        e = np.eye(4)[k]
        assert abs(theta(z + e, ctx) / theta(z, ctx) - 1) < 1e-11


def test_quasi_periods(ctx):
    z = _z(np.random.default_rng(3))
    B = ctx.B
    for k in range(4):
        factor = np.exp(-1j * math.pi * B[k, k] - 2j * math.pi * z[k])
        assert abs(theta(z + B[:, k], ctx) / (factor * theta(z, ctx)) - 1) < 1e-10


def test_truncation_doubling(ctx):
    z = _z(np.random.default_rng(4))
    big = ThetaContext.build(ctx.B, trunc_radius=min(2 * ctx.trunc_radius, 12))
    assert abs(theta(z, big) / theta(z, ctx) - 1) < 1e-14


def test_truncation_cap():
    with pytest.raises(ThetaTruncationError):
        ThetaContext.build([[1e-4j]])


def test_not_positive_definite():
    with pytest.raises(ValueError):
        ThetaContext.build([[1.0 + 0j]])


def test_u_matches_finite_differences(sol):
    x, y, t, h = 3.0, 2.0, 0.5, 1e-3
    f = [complex(log_theta_jet(x + k * h, y, t, sol, (0, 0, 0)).constant) for k in (-1, 0, 1)]
    fd = 2 * (f[0] - 2 * f[1] + f[2]).real / h**2 + 2 * sol.omega11
    assert abs(u_fingap(x, y, t, sol) - fd) < 1e-5 * max(1.0, abs(fd))


def test_c_shift_by_lattice_leaves_u(rd, sol):
    n = np.array([1, 0, -1, 2])
    C = rd.B_np().imag @ n
    shifted = FingapSolution.from_riemann(rd, C)
    x = np.linspace(-5, 5, 7)
    assert np.allclose(u_fingap(x, 1.0, 0.0, shifted), u_fingap(x, 1.0, 0.0, sol), atol=1e-9)


def test_complex_c_rejected(rd):
    with pytest.raises(ValueError):
        FingapSolution.from_riemann(rd, np.array([1 + 1j, 0, 0, 0]))


def test_theta_positive_on_window(sol):
    X, Y = np.meshgrid(np.linspace(-60, 60, 25), np.linspace(0, 120, 25))
    F = log_theta_jet(X, Y, 0.0, sol, (0, 0, 0))
    v = F.constant
    # log theta is real: theta itself is real and positive
    assert np.max(np.abs(v.imag)) < 1e-9 * max(1.0, float(np.max(np.abs(v.real))))


@settings(max_examples=10, deadline=None)
@given(x=st.floats(-20, 20), y=st.floats(-20, 20), t=st.floats(-1, 1))
def test_kp_residual_small(sol, x, y, t):
    assert kp_residual_fingap(x, y, t, sol) < 1e-6
