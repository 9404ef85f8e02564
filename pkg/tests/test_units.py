import math

import numpy as np
import pytest

from gwfql.units import CODATA, GwFieldConstants, PhysicalConstants, effective_mass, zero_point_strain


def test_codata_values():
    assert CODATA.c == 299792458.0
    assert CODATA.G == pytest.approx(6.6743e-11, rel=1e-12)
    assert CODATA.hbar == pytest.approx(1.054571817e-34, rel=1e-12)


@pytest.mark.parametrize("field", ["G", "c", "hbar"])
@pytest.mark.parametrize("bad", [0.0, -1.0, math.inf, math.nan])
def test_constants_must_be_positive(field, bad):
    with pytest.raises(ValueError, match=field):
        PhysicalConstants(**{field: bad})


def test_effective_mass_natural_units():
    assert effective_mass(PhysicalConstants.natural()) == pytest.approx(1.0 / (32.0 * math.pi), rel=1e-15)


def test_effective_mass_si():
    # c^2/(32 pi G) evaluated by hand: 8.9875518e16 / 6.7097380e-9
    assert effective_mass(CODATA) == pytest.approx(1.339479e25, rel=1e-6)
    assert GwFieldConstants(CODATA).M_G == effective_mass(CODATA)


def test_zero_point_strain_scalar_and_array():
    nat = PhysicalConstants.natural()
    assert zero_point_strain(nat, 2.0) == pytest.approx(math.sqrt(8.0 * math.pi), rel=1e-15)
    w = np.array([0.5, 1.0, 4.0])
    h = zero_point_strain(nat, w)
    assert h.shape == (3,)
    np.testing.assert_allclose(h**2 * w, 16.0 * math.pi, rtol=1e-14)


@pytest.mark.parametrize("bad", [0.0, -3.0])
def test_zero_point_strain_rejects_nonpositive(bad):
    with pytest.raises(ValueError):
        zero_point_strain(CODATA, bad)
    with pytest.raises(ValueError):
        zero_point_strain(CODATA, np.array([1.0, bad]))
