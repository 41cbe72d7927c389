import numpy as np
import pytest
from conftest import KAPPA, quiet_params

from kpmcurve.curve import SpectralParams
from kpmcurve.cycles import (
    C_DOT_B,
    TopologyError,
    build_cycles,
    conjugation_defect,
    deformation_threshold,
    intersection_numbers,
    on_curve_residual,
    trace_real_ovals,
)


def test_five_real_ovals(params):
    ovals = trace_real_ovals(params)
    assert sorted(o.label for o in ovals) == ["Omega0", "b1", "b2", "b3", "b4"]
    assert [o.bounded for o in ovals].count(False) == 1


def test_oval_points_on_curve(params):
    assert on_curve_residual(params) < 1e-10


def test_oval_labels_stable_in_epsilon():
    a = trace_real_ovals(SpectralParams(KAPPA, 1e-2))
    b = trace_real_ovals(SpectralParams(KAPPA, 1e-3))
    assert [o.label for o in a] == [o.label for o in b]
    assert [o.bounded for o in a] == [o.bounded for o in b]


def test_c_dot_b_table(basis):
    assert basis.c_dot_b == C_DOT_B


def test_symplectic_intersection(basis):
    J = basis.intersection
    assert np.array_equal(J[:4, :4], np.zeros((4, 4)))
    assert np.array_equal(J[:4, 4:], np.eye(4))
    assert np.array_equal(J, -J.T)


def test_recomputed_intersections(basis):
    assert np.array_equal(intersection_numbers(basis), basis.intersection)


def test_cycles_close(basis):
    for cyc in basis.c + basis.b + [basis.omega0]:
        assert cyc.closure_defect() < 1e-10


def test_c_loops_conjugation_invariant(basis):
    # conjugation maps each c-contour to itself run backwards
    for cyc in basis.c:
        assert conjugation_defect(cyc) < 1e-8


def test_outside_regime_is_a_topology_error():
    p = quiet_params(KAPPA, 0.1)
    with pytest.raises(TopologyError):
        build_cycles(p)


def test_deformation_threshold_brackets_default():
    thr = deformation_threshold(KAPPA, iters=12)
    assert 1e-2 < thr < 0.1


def test_basis_deterministic(params):
    a = build_cycles(params).dump()
    b = build_cycles(SpectralParams(KAPPA, 1e-2)).dump()
    assert a == b
