import warnings

import pytest

from kpmcurve.curve import SpectralParams
from kpmcurve.cycles import build_cycles
from kpmcurve.periods import riemann_data
from kpmcurve.soliton import SolitonData
from kpmcurve.theta import FingapSolution

KAPPA = (-1.5, -0.75, 0.5, 2.0)


@pytest.fixture(scope="session")
def params():
    return SpectralParams(KAPPA, 1e-2)


@pytest.fixture(scope="session")
def basis(params):
    return build_cycles(params)


@pytest.fixture(scope="session")
def rd(params):
    return riemann_data(params)


@pytest.fixture(scope="session")
def sol(rd):
    return FingapSolution.from_riemann(rd)


@pytest.fixture(scope="session")
def unit_data():
    return SolitonData.from_weights(1.0, 1.0, 1.0, 1.0)


def quiet_params(kappa, eps, precision="standard"):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return SpectralParams(kappa, eps, precision)
