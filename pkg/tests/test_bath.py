import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gwfql.bath import (
    BathModel,
    cat_qfi,
    decoherence_prediction,
    diffusion_coefficient,
    diffusion_density,
    gamma_B,
    high_temp_S,
    relative_deviation,
    thermal_S,
    vacuum_qfi,
)
from gwfql.opensys import LindbladGenerator
from gwfql.sky import Direction, SkyQuadrature
from gwfql.units import CODATA, PhysicalConstants

from conftest import random_unit_vectors

NAT = PhysicalConstants.natural()


def test_high_temp_formula():
    assert high_temp_S(2.0, NAT) == pytest.approx(2.0 / math.pi, rel=1e-15)
    with pytest.raises(ValueError):
        high_temp_S(0.0, NAT)


def test_thermal_matches_high_temperature_limit():
    L = 4000.0
    Omega = 1e-3 * CODATA.c / L
    beta = 1e-4 / (CODATA.hbar * Omega)
    for d in (Direction(0.0, 0.0), Direction(math.pi / 2, 0.0), Direction(1.0, 2.0)):
        ratio = thermal_S(d, Omega, beta, L, CODATA) / high_temp_S(beta, CODATA)
        assert ratio == pytest.approx(1.0, abs=1e-3)
        assert ratio == pytest.approx(1.0 - 0.5e-4, abs=1e-6)  # x/(e^x - 1) ~ 1 - x/2


def test_thermal_arm_response_and_symmetry():
    L, Omega, beta = 1.0, 2.0 * math.pi, 0.1
    along = thermal_S(Direction(math.pi / 2, 0.0), Omega, beta, L, NAT)
    across = thermal_S(Direction(0.0, 0.0), Omega, beta, L, NAT)
    assert along == pytest.approx(0.0, abs=1e-30)  # sinc(pi) = 0
    assert across > 0
    assert thermal_S(Direction(0.0, 0.0), -Omega, beta, L, NAT) == across
    with pytest.raises(ValueError):
        thermal_S(Direction(0.0, 0.0), 0.0, beta, L, NAT)
    with pytest.raises(ValueError):
        thermal_S(Direction(0.0, 0.0), 1.0, -1.0, L, NAT)


def test_gamma_B_isotropic_oracle(quad):
    # (1/2) s * 16 pi / 15
    assert gamma_B(BathModel.isotropic(3.0), quad) == pytest.approx(1.6 * math.pi, rel=1e-12)


def test_diffusion_coefficient_and_lindblad_rate(natural_model, quad):
    bath = BathModel.isotropic(0.25)
    gb = gamma_B(bath, quad)
    D = diffusion_coefficient(natural_model, gb)
    # (4/hbar)(omega0 alpha_bar/2)^2 gamma_B with omega0 alpha_bar / 2 = 3
    assert D == pytest.approx(36.0 * gb, rel=1e-15)
    gen = LindbladGenerator.from_bath(natural_model, bath, quad)
    assert gen.rate == pytest.approx(D / 4.0, rel=1e-15)
    with pytest.raises(ValueError):
        diffusion_coefficient(natural_model, -1.0)


def test_coloured_bath_rejected_by_solver(natural_model, quad):
    bath = BathModel.thermal(1.0, 2.0, 1.0, NAT)
    assert not bath.white
    with pytest.raises(ValueError, match="white"):
        LindbladGenerator.from_bath(natural_model, bath, quad)


@given(st.floats(0.0, math.pi), st.floats(0.0, 2 * math.pi), st.floats(1e-3, 1e3))
@settings(max_examples=100, deadline=None)
def test_diffusion_density_is_vacuum_qfi_times_strength(theta, phi, s):
    from gwfql.spectra import DetectorModel

    m = DetectorModel(omega0=3.0, alpha_bar=2.0, L=1.5, M=1.0, gamma_cav=0.7, constants=NAT)
    d = Direction(theta, phi)
    bath = BathModel.isotropic(s)
    a = float(diffusion_density(m, bath, d.n)[0])
    b = vacuum_qfi(m, d) * s
    assert relative_deviation(a, b) < 1e-13


def test_prediction_routes_agree(model, quad, rng):
    bath = BathModel.thermal_high_temperature(1.0 / (1.380649e-23 * 300.0), CODATA)
    dirs = [Direction.from_vector(v) for v in random_unit_vectors(rng, 40)]
    rep = decoherence_prediction(model, bath, x0=2.0, quad=quad, sample_directions=dirs)
    assert relative_deviation(rep.dD_dk, rep.dD_dk_from_qfi) < 1e-13
    assert relative_deviation(rep.dgamma_dec_dk, rep.dgamma_dec_dk_from_qfi) < 1e-13
    assert rep.gamma_dec == pytest.approx(rep.gamma_dec_from_qfi, rel=1e-13)
    assert rep.gamma_dec == pytest.approx(rep.D * 4.0, rel=1e-15)
    assert rep.max_relative_deviation < 1e-13
    payload = rep.to_json()
    assert payload["D"]["unit"] == "s^-1"
    assert len(payload["direction_samples"]) == 40


def test_cat_qfi_scales_with_spread(natural_model):
    d = Direction(0.5, 0.5)
    assert cat_qfi(natural_model, d, 2.0) == pytest.approx(8.0 * vacuum_qfi(natural_model, d), rel=1e-15)


def test_cap_bath_on_arm_gives_zero_densities(natural_model, quad):
    bath = BathModel.cap(5.0, [1.0, 0.0, 0.0], 0.01)
    on_arm = Direction(math.pi / 2, 0.0)
    assert bath.at(on_arm) == 5.0
    assert bath.at(Direction(0.0, 0.0)) == 0.0
    rep = decoherence_prediction(natural_model, bath, 1.0, quad, [on_arm, Direction(1.0, 1.0)])
    # cos(pi/2) leaves n_z ~ 6e-17, so "zero" is at the 1e-60 level
    assert np.all(rep.dD_dk < 1e-60) and np.all(rep.dD_dk_from_qfi < 1e-60)
    assert rep.D == 0.0 and rep.gamma_dec_from_qfi == 0.0


def test_linearity_in_bath_strength(natural_model, quad):
    base = BathModel.cap(1.0, [0.0, 0.0, 1.0], 1.0)
    dirs = [Direction(0.2, 0.0), Direction(0.5, 3.0)]
    r1 = decoherence_prediction(natural_model, base, 1.5, quad, dirs)
    r10 = decoherence_prediction(natural_model, base.scaled(10.0), 1.5, quad, dirs)
    assert r10.D == pytest.approx(10.0 * r1.D, rel=1e-14)
    np.testing.assert_allclose(r10.dgamma_dec_dk, 10.0 * r1.dgamma_dec_dk, rtol=1e-14)


def test_bath_validation():
    with pytest.raises(ValueError):
        BathModel.isotropic(-1.0)
    bad = BathModel(lambda n: -np.ones(len(n)))
    with pytest.raises(ValueError, match="non-negative"):
        bad.values(np.array([[0.0, 0.0, 1.0]]))
    f = BathModel.from_function(lambda d: d.n[2] ** 2)
    assert f.at(Direction(0.0, 0.0)) == pytest.approx(1.0)
    quad = SkyQuadrature(6, 12)
    assert gamma_B(f, quad) > 0


def test_relative_deviation_handles_zeros():
    assert relative_deviation([0.0, 0.0], [0.0, 0.0]) == 0.0
    assert relative_deviation([1.0, 0.0], [1.0, 1e-300]) == 1.0
    assert relative_deviation([], []) == 0.0
