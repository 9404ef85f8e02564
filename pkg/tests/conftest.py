import math

import numpy as np
import pytest

from gwfql.config import RunConfig
from gwfql.opensys import _backend
from gwfql.sky import SkyQuadrature
from gwfql.spectra import DetectorModel, FrequencyGrid, lorentzian_alpha1_psd
from gwfql.units import PhysicalConstants

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def default_config():
    return RunConfig()


@pytest.fixture(scope="session")
def model(default_config):
    return default_config.detector_model()


@pytest.fixture(scope="session")
def psd(default_config, model):
    return default_config.noise_spectrum(model)


@pytest.fixture(scope="session")
def quad():
    return SkyQuadrature()


@pytest.fixture(scope="session")
def natural_model():
    """Order-one detector in G = c = hbar = 1 units."""
    return DetectorModel(
        omega0=3.0, alpha_bar=2.0, L=1.5, M=1.0, gamma_cav=0.7, constants=PhysicalConstants.natural()
    )


@pytest.fixture(scope="session")
def natural_psd(natural_model):
    grid = FrequencyGrid.log(1e-3, 1e3, 2000)
    return lorentzian_alpha1_psd(natural_model, grid, cutoff_omega=20.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20231014)


@pytest.fixture(params=_backend.available())
def kernels(request):
    return _backend.load(request.param)


def random_unit_vectors(rng, n):
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
