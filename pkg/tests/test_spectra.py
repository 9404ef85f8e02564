import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwfql.qfim import GeneratorModel, qcrb_bound, qfim_spectrum
from gwfql.spectra import (
    DetectorModel,
    FrequencyGrid,
    NoiseSpectrum,
    energy_psd,
    eql_check,
    lorentzian_alpha1_psd,
    mizuno_bound,
    mizuno_functional,
    read_psd_csv,
    sql_strain_psd,
    write_psd_csv,
)
from gwfql.units import CODATA, PhysicalConstants


def _model(**kw):
    base = dict(omega0=1.77e15, L=4000.0, M=40.0, gamma_cav=263.9)
    base.update(kw)
    n = base.pop("N", 1e20)
    return DetectorModel.from_photon_number(n, **base)


def test_photon_number_round_trip():
    m = _model(N=3.5e19)
    assert m.N_photons == pytest.approx(3.5e19, rel=1e-14)
    assert m.alpha_bar == pytest.approx(math.sqrt(2 * CODATA.hbar * 3.5e19), rel=1e-15)
    assert m.coupling == pytest.approx(0.5 * m.omega0 * m.alpha_bar, rel=1e-15)
    assert m.intracavity_energy == pytest.approx(3.5e19 * CODATA.hbar * 1.77e15, rel=1e-14)


@pytest.mark.parametrize("field", ["omega0", "L", "M", "gamma_cav"])
def test_detector_rejects_nonpositive(field):
    with pytest.raises(ValueError, match=field):
        _model(**{field: 0.0})


def test_grid_validation():
    with pytest.raises(ValueError):
        FrequencyGrid(np.array([0.0]))
    with pytest.raises(ValueError):
        FrequencyGrid(np.array([-1.0, 1.0]))
    with pytest.raises(ValueError):
        FrequencyGrid(np.array([0.0, 2.0, 1.0]))
    with pytest.raises(ValueError):
        FrequencyGrid.log(1.0, 1.0, 10)
    g = FrequencyGrid.log(1.0, 100.0, 3)
    np.testing.assert_allclose(g.omega, [0.0, 1.0, 10.0, 100.0])
    assert len(FrequencyGrid.log(1.0, 100.0, 3, include_zero=False)) == 3


def test_grid_integrate_is_two_sided():
    g = FrequencyGrid(np.linspace(0.0, 1.0, 11))
    # int_{-1}^{1} dOmega/2pi of a constant 1  =  1/pi
    assert g.integrate(np.ones(11)) == pytest.approx(1.0 / math.pi, rel=1e-15)


def test_lorentzian_total_variance_is_vacuum():
    m = _model()
    psd = lorentzian_alpha1_psd(m, FrequencyGrid.log(1e-2, 1e12, 8000))
    assert psd.integrate() == pytest.approx(0.5 * CODATA.hbar, rel=1e-5)


def test_lorentzian_squeezing_scaling():
    grid = FrequencyGrid.log(1e-2, 1e6, 100)
    a = lorentzian_alpha1_psd(_model(), grid)
    b = lorentzian_alpha1_psd(_model(squeeze_r=0.5), grid)
    np.testing.assert_allclose(b.values / a.values, math.e, rtol=1e-14)


def test_cutoff_suppresses_high_frequencies():
    grid = FrequencyGrid.log(1e-2, 1e9, 500)
    psd = lorentzian_alpha1_psd(_model(), grid, cutoff_omega=1e6)
    assert psd.values[-1] == 0.0
    with pytest.raises(ValueError):
        lorentzian_alpha1_psd(_model(), grid, cutoff_omega=-1.0)


def test_spectrum_interpolation_and_band():
    grid = FrequencyGrid(np.array([0.0, 1.0, 2.0]))
    s = NoiseSpectrum(grid, np.array([1.0, 3.0, 5.0]))
    assert s.at(0.5) == pytest.approx(2.0)
    assert s.at(-1.5) == pytest.approx(4.0)
    np.testing.assert_allclose(s.at(np.array([0.0, 2.0])), [1.0, 5.0])
    with pytest.raises(ValueError, match="extrapolation"):
        s.at(2.5)
    with pytest.raises(ValueError):
        NoiseSpectrum(grid, np.array([1.0, -1.0, 0.0]))
    with pytest.raises(ValueError):
        NoiseSpectrum(grid, np.array([1.0, 2.0]))


def test_csv_round_trip_is_exact(tmp_path):
    psd = lorentzian_alpha1_psd(_model(), FrequencyGrid.log(1e-2, 1e9, 200), cutoff_omega=1e7)
    path = tmp_path / "psd.csv"
    write_psd_csv(path, psd)
    back = read_psd_csv(path)
    assert np.array_equal(back.omega, psd.omega)
    assert np.array_equal(back.values, psd.values)
    assert path.read_text().splitlines()[0] == "omega_rad_s,S_alpha1"


def test_csv_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("f,S\n0,1\n1,2\n")
    with pytest.raises(ValueError, match="header"):
        read_psd_csv(path)


def test_sql_formula():
    m = _model()
    assert sql_strain_psd(m, 100.0) == pytest.approx(8 * CODATA.hbar / (40.0 * 1e4 * 4000.0**2), rel=1e-15)
    with pytest.raises(ValueError):
        sql_strain_psd(m, np.array([0.0, 1.0]))


@given(
    log_n=st.floats(10.0, 22.0),
    log_gamma=st.floats(0.0, 4.0),
)
@settings(max_examples=25, deadline=None)
def test_mizuno_saturation_for_coherent_drive(log_n, log_gamma):
    m = _model(N=10.0**log_n, gamma_cav=10.0**log_gamma)
    psd = lorentzian_alpha1_psd(m, FrequencyGrid.log(1e-4, 1e12, 6000))
    F = qfim_spectrum(psd, GeneratorModel(m, tau_xx_sq=1.0))
    assert mizuno_functional(psd.grid, F.values) / mizuno_bound(m) == pytest.approx(1.0, rel=1e-4)


def test_mizuno_natural_units():
    nat = PhysicalConstants.natural()
    m = DetectorModel(omega0=2.0, alpha_bar=3.0, L=1.0, M=1.0, gamma_cav=1.0, constants=nat)
    assert mizuno_bound(m) == pytest.approx(4.5 * 4.0)
    psd = lorentzian_alpha1_psd(m, FrequencyGrid.log(1e-5, 1e7, 8000))
    F = qfim_spectrum(psd, GeneratorModel(m, tau_xx_sq=1.0))
    assert mizuno_functional(psd.grid, lambda w: np.interp(w, F.omega, F.values)) == pytest.approx(18.0, rel=1e-4)


def test_mizuno_functional_validates():
    g = FrequencyGrid(np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        mizuno_functional(g, np.array([1.0, np.inf]))
    with pytest.raises(ValueError):
        mizuno_functional(g, np.array([1.0, 2.0, 3.0]))


def test_energy_psd():
    m = _model()
    psd = lorentzian_alpha1_psd(m, FrequencyGrid.log(1.0, 1e3, 20))
    np.testing.assert_allclose(energy_psd(m, psd).values, (m.omega0 * m.alpha_bar) ** 2 * psd.values, rtol=1e-15)


def test_eql_check():
    m = _model()
    psd = lorentzian_alpha1_psd(m, FrequencyGrid.log(1e-2, 1e10, 4000))
    S_E = energy_psd(m, psd)
    bound = qcrb_bound(qfim_spectrum(psd, GeneratorModel(m, tau_xx_sq=1.0)))
    above = NoiseSpectrum(psd.grid, bound.values * (1 + 1e-9))
    ok = eql_check(S_E, above, model=m)
    assert ok.passed and ok.margin == pytest.approx(1.0, rel=1e-8)
    assert ok.coherent_ratio == pytest.approx(1.0, rel=1e-4)
    below = NoiseSpectrum(psd.grid, bound.values * 0.5)
    bad = eql_check(S_E, below)
    assert not bad.passed and bad.margin == pytest.approx(0.5, rel=1e-12)
    assert bad.coherent_ratio is None
    other = NoiseSpectrum(FrequencyGrid.log(1.0, 2.0, 5), np.ones(6))
    with pytest.raises(ValueError, match="grid"):
        eql_check(S_E, other)
