import numpy as np
import pytest
from conftest import KAPPA, quiet_params
from hypothesis import given, settings
from hypothesis import strategies as st

from kpmcurve.curve import (
    CurvePoint,
    NodalCurveError,
    SpectralParams,
    branch_points,
    eval_curve,
    mu_branches,
    mu_coefficients,
    nodes,
    p0_branch,
    p_lam,
    p_mu,
    p_value,
    q_on_curve,
    residual_scale,
)


def test_factored_and_expanded_forms_agree(params):
    rng = np.random.default_rng(3)
    for lam, mu in rng.normal(size=(20, 2)) + 1j * rng.normal(size=(20, 2)):
        c = mu_coefficients(lam, params)
        expanded = sum(ci * mu**i for i, ci in enumerate(c))
        assert abs(p_value(lam, mu, params) - expanded) <= 1e-12 * residual_scale(lam, mu, params)


def test_p_is_p0_plus_perturbation(params):
    lam, mu = 0.3 + 0.2j, -0.7 + 0.1j
    p0 = eval_curve("P0", CurvePoint(lam, mu), params)
    p = eval_curve("P", CurvePoint(lam, mu), params)
    eps, beta = params.epsilon, params.beta
    assert abs(p - p0 - eps * (beta**2 - mu**2)) < 1e-14


def test_partial_derivatives_by_finite_differences(params):
    lam, mu, h = 0.4 - 0.3j, 0.25 + 0.5j, 1e-6
    d_mu = (p_value(lam, mu + h, params) - p_value(lam, mu - h, params)) / (2 * h)
    d_lam = (p_value(lam + h, mu, params) - p_value(lam - h, mu, params)) / (2 * h)
    assert abs(d_mu - p_mu(lam, mu, params)) < 1e-8
    assert abs(d_lam - p_lam(lam, mu, params)) < 1e-8


def test_beta_for_default_phases(params):
    assert params.beta == pytest.approx(1.25)


def test_unordered_phases_rejected():
    with pytest.raises(ValueError):
        SpectralParams((0.0, -1.0, 1.0, 2.0), 0.01)


def test_nodal_branches_at_zero_lambda():
    p = SpectralParams(KAPPA, 0.0)
    mus = sorted(complex(m).real for m in mu_branches(0.0, p))
    # lines mu = 0, lam - k1, -(lam - k2), lam - k3, -(lam - k4)
    expected = sorted([0.0, -KAPPA[0], KAPPA[1], -KAPPA[2], KAPPA[3]])
    assert np.allclose(mus, expected, atol=1e-12)


def test_double_root_at_first_phase_when_nodal():
    p = SpectralParams(KAPPA, 0.0)
    mus = [complex(m) for m in mu_branches(KAPPA[0], p)]
    assert sum(abs(m) < 1e-7 for m in mus) == 2


def test_nodes_lie_on_two_lines():
    p = SpectralParams(KAPPA, 0.0)
    nd = nodes(p)
    assert len(nd) == 8
    lams = sorted(n.lam for n in nd if not n.on_axis)
    assert -1.125 in lams
    for n in nd:
        assert abs(p_value(n.lam, n.mu, p)) < 1e-12
        assert abs(p_mu(n.lam, n.mu, p)) < 1e-12
        assert abs(p_lam(n.lam, n.mu, p)) < 1e-12


def test_nodal_curve_has_no_branch_points():
    with pytest.raises(NodalCurveError):
        branch_points(SpectralParams(KAPPA, 0.0))


def test_branch_points_are_critical(params):
    bps = branch_points(params)
    assert len(bps) == 16
    for b in bps:
        s = residual_scale(b.lam, b.mu, params)
        assert abs(p_value(b.lam, b.mu, params)) < 1e-12 * s
        assert abs(p_mu(b.lam, b.mu, params)) < 1e-10 * max(1.0, s)


def test_branch_points_closed_under_conjugation(params):
    z = [complex(b.lam) for b in branch_points(params)]
    for w in z:
        assert min(abs(w.conjugate() - v) for v in z) < 1e-12


def test_p0_branch_asymptotics(params):
    lam = 50.0
    mu = complex(p0_branch(lam, params))
    lead = -params.epsilon * params.beta**2 / np.prod([lam - k for k in KAPPA])
    assert abs(p_value(lam, mu, params)) < 1e-12 * residual_scale(lam, mu, params)
    assert abs(mu - lead) < 0.2 * abs(lead)


def test_p0_branch_rejects_small_lambda(params):
    with pytest.raises(ValueError):
        p0_branch(1.0, params)


def test_q_on_curve_matches_quotient(params):
    from kpmcurve.curve import q_value
    lam = 0.3 + 0.1j
    for mu in mu_branches(lam, params):
        assert abs(q_on_curve(lam, mu, params) - q_value(lam, mu, params)) < 1e-8


@settings(max_examples=25, deadline=None)
@given(lam=st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False),
       eps=st.floats(1e-4, 1e-2))
def test_mu_roots_sum_to_trace(lam, eps):
    p = quiet_params(KAPPA, eps)
    c = mu_coefficients(lam, p)
    roots = mu_branches(lam, p)
    total = sum(complex(r) for r in roots)
    assert abs(total + complex(c[4]) / complex(c[5])) < 1e-9 * (1 + abs(lam))
    for r in roots:
        assert abs(p_value(lam, r, p)) <= 1e-9 * residual_scale(lam, r, p)


def test_mu_branches_conjugate_symmetric(params):
    lam = 0.7 + 0.4j
    a = sorted((complex(m) for m in mu_branches(lam, params)), key=lambda z: (z.real, z.imag))
    b = sorted((complex(m).conjugate() for m in mu_branches(lam.conjugate(), params)),
               key=lambda z: (z.real, z.imag))
    assert np.allclose(a, b, atol=1e-12)


def test_extended_branch_points_refine_standard():
    p = SpectralParams(KAPPA, 1e-2, "extended")
    for b in branch_points(p):
        assert float(abs(p_value(b.lam, b.mu, p))) < 1e-25
