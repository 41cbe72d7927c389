import math

import numpy as np
import pytest
from conftest import KAPPA

from kpmcurve.checks import (
    TOLERANCES,
    CheckReport,
    check_abel_vs_periods,
    check_kp_residual,
    check_omega_hat_symmetry,
    check_riemann_symmetry,
    crest_set,
    grid_points,
    shifted_hausdorff,
)
from kpmcurve.curve import SpectralParams
from kpmcurve.periods import riemann_data


def test_report_pass_rule():
    assert CheckReport.make("x", 1e-9, 1e-9).passed
    assert not CheckReport.make("x", 2e-9, 1e-9).passed
    assert not CheckReport.make("x", math.nan, 1.0).passed


def test_zero_tolerance_fails(rd):
    r = check_riemann_symmetry(rd, tol=0.0)
    assert r.defect > 0 and not r.passed


def test_default_tolerances(rd, params):
    assert check_riemann_symmetry(rd).tolerance == TOLERANCES["standard"]["riemann_symmetry"]
    assert check_riemann_symmetry(rd).passed
    assert check_omega_hat_symmetry(rd).passed
    assert check_abel_vs_periods(rd, params).passed


def test_abel_reports_lsq_diagnostic(rd, params):
    r = check_abel_vs_periods(rd, params)
    assert r.context["doubling_drift"] < 1e-10
    assert math.isfinite(r.context["three_point_lsq_defect"])


def test_abel_skipped_when_nodal(rd):
    p = SpectralParams(KAPPA, 0.0)
    r = check_abel_vs_periods(rd, p)
    assert not r.passed and "skipped" in r.context


def test_stub_residual_fails_at_zero_tolerance():
    r = check_kp_residual(lambda x, y, t: 1e-3 + 0 * x, (-1, 1, 3, -1, 1, 3, (0.0,)), tol=0.0)
    assert r.defect == pytest.approx(1e-3) and not r.passed


def test_grid_layout():
    X, Y, T = grid_points((0, 1, 3, 10, 20, 2, (0.0, 1.0)))
    assert X.shape == (2, 2, 3)
    assert np.all(X[0, 0] == [0, 0.5, 1])
    assert np.all(Y[0, :, 0] == [10, 20])


def test_hausdorff_recovers_shift():
    u = np.zeros((30, 30))
    u[10, 5:20] = 1.0
    v = np.roll(u, 3, axis=0)
    d0, shift = shifted_hausdorff(u, v)
    assert d0 == 0.0 and shift == (3, 0)
    assert len(crest_set(u)) == 15


def test_extended_shrinks_symmetry_defect():
    p = SpectralParams(KAPPA, 1e-4)
    std = check_riemann_symmetry(riemann_data(p)).defect
    ext = check_riemann_symmetry(riemann_data(p.with_precision("extended"))).defect
    assert ext * 10 <= std


def test_checks_deterministic(rd, params):
    a = check_abel_vs_periods(rd, params)
    b = check_abel_vs_periods(rd, params)
    assert a.as_dict() == b.as_dict()
