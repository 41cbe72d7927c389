import itertools

import numpy as np
import pytest

from kpmcurve.curve import CurvePoint, mu_branches, track_segment
from kpmcurve.numerics.paths import LineSegment
from kpmcurve.periods import (
    DifferentialSpec,
    RiemannData,
    abel_map,
    cycle_periods,
    integrate_differential,
    lattice_reduce,
)


def test_a_periods_are_identity(rd):
    assert rd.diagnostics["a_identity_defect"] < 1e-10


def test_riemann_matrix_symmetric_purely_imaginary(rd):
    B = rd.B_np()
    assert np.max(np.abs(B - B.T)) / np.max(np.abs(B)) < 1e-9
    assert np.max(np.abs(B.real)) / np.max(np.abs(B)) < 1e-9
    assert np.min(np.linalg.eigvalsh(B.imag)) > 0


def test_flows_purely_imaginary(rd):
    W = rd.W_np()
    assert W.shape == (3, 4)
    assert np.max(np.abs(W.real)) / np.max(np.abs(W)) < 1e-9


def test_omega_hat_symmetric_and_real(rd):
    oh = rd.omega_hat_np()
    assert np.max(np.abs(oh - oh.T)) < 1e-8
    assert rd.diagnostics["omega_hat_imag_defect"] < 1e-8


def test_second_kind_normalized(rd):
    assert rd.diagnostics["second_kind_a_period_defect"] < 1e-9
    assert rd.diagnostics["second_kind_residue"] < 1e-8


def test_reversed_cycle_negates_periods(params, basis):
    cyc = basis.c[0]
    spec = DifferentialSpec("lam")
    fwd = integrate_differential(spec, cyc, params)
    back = integrate_differential(spec, cyc.reversed(), params)
    assert abs(fwd + back) < 1e-11 * max(1.0, abs(fwd))


def test_unknown_numerator():
    with pytest.raises(ValueError):
        DifferentialSpec("mu3")


def test_real_ovals_bound_a_half_surface(params, basis):
    # the five real ovals together bound one half of the curve, so a signed
    # sum of their holomorphic periods vanishes
    v = [np.array(cycle_periods(c, params, which=range(4)), dtype=complex)
         for c in basis.b + [basis.omega0]]
    best = min(np.max(np.abs(sum(s * x for s, x in zip(signs, v[:4])) + v[4]))
               for signs in itertools.product((1, -1), repeat=4))
    assert best < 1e-9


def test_abel_map_base_to_itself(params, rd):
    lam = 0.1 + 0.6j
    P = CurvePoint(lam, mu_branches(lam, params)[0])
    assert np.all(np.abs(np.array(abel_map(P, P, params, rd), dtype=complex)) == 0)


def test_abel_map_path_independent_mod_lattice(params, rd):
    l0, l1 = 0.1 + 0.6j, 1.2 + 0.4j
    base = CurvePoint(l0, mu_branches(l0, params)[0])
    # the target sheet is the continuation along the straight segment
    mu1 = track_segment(LineSegment(l0, l1), base.mu, params).end.mu
    P = CurvePoint(l1, mu1)
    direct = np.array(abel_map(P, base, params, rd, via=((l0 + l1) / 2,)), dtype=complex)
    other = np.array(abel_map(P, base, params, rd, via=(0.6 + 2.5j,)), dtype=complex)
    m, n, r = lattice_reduce(other - direct, rd.B_np())
    assert np.max(np.abs(r)) < 1e-8


def test_text_round_trip(rd):
    back = RiemannData.from_text(rd.to_text())
    assert np.array_equal(back.B_np(), rd.B_np())
    assert np.array_equal(back.W_np(), rd.W_np())
    assert np.array_equal(back.omega_hat_np(), rd.omega_hat_np())
    assert back.to_text() == rd.to_text()
