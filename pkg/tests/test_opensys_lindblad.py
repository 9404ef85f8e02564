import csv
import math

import numpy as np
import pytest

from gwfql.opensys import (
    CatStateSpec,
    FockDensityMatrix,
    LindbladGenerator,
    SolverError,
    StabilityError,
    build_cat_state,
    coherent_ket,
    evolve,
    evolve_for,
    p_operator,
    x_operator,
)
from gwfql.opensys import _kernels_py
from gwfql.opensys.states import x_offdiag


def _random_density(rng, n, rank=3):
    a = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    a[n // 2 :] *= 1e-3
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def test_rhs_is_traceless_hermitian_and_matches_double_commutator(rng, kernels):
    n, lam = 12, 0.3
    rho = _random_density(rng, n)
    out = np.asarray(kernels.lindblad_rhs(rho, x_offdiag(n), lam))
    x = x_operator(n)
    expected = -lam * (x @ (x @ rho - rho @ x) - (x @ rho - rho @ x) @ x)
    np.testing.assert_allclose(out, expected, atol=1e-14)
    assert abs(np.trace(out)) < 1e-14
    np.testing.assert_allclose(out, out.conj().T, atol=1e-15)


def test_momentum_diffusion_and_conserved_x():
    lam = 0.5
    rho = build_cat_state(CatStateSpec(1.0, n_fock=50))
    traj = evolve_for(rho, LindbladGenerator(lam), duration=0.2, n_samples=20)
    x, p = x_operator(50), p_operator(50)
    slope = np.polyfit(traj.times, traj.expect(p @ p), 1)[0]
    assert slope == pytest.approx(2.0 * lam, rel=1e-6)
    np.testing.assert_allclose(traj.expect(x @ x), traj.expect(x @ x)[0], rtol=1e-10)


def test_vacuum_purity_loss_rate():
    lam = 1e-2
    rho = FockDensityMatrix.from_ket(coherent_ket(0.0, 30))
    traj = evolve(rho, LindbladGenerator(lam), dt=1e-3, steps=2)
    f0, f1, f2 = traj.purity()
    assert (-3 * f0 + 4 * f1 - f2) / 2e-3 == pytest.approx(-2.0 * lam, rel=1e-6)


def test_stability_bound_enforced():
    gen = LindbladGenerator(1.0)
    rho = np.eye(10) / 10
    assert gen.max_step(10) == pytest.approx(0.005)
    with pytest.raises(StabilityError):
        evolve(rho, gen, dt=0.006, steps=1)
    evolve(rho, gen, dt=0.005, steps=1)


def test_trace_drift_detected(monkeypatch):
    class Leaky:
        @staticmethod
        def rk4_propagate(rho, off, lam, dt, steps):
            return rho * (1.0 + 1e-6)

    with pytest.raises(SolverError, match="trace drift"):
        evolve(np.eye(4) / 4, LindbladGenerator(1.0), dt=1e-3, steps=1, kernels=Leaky)


def test_zero_rate_is_identity():
    rho = build_cat_state(CatStateSpec(1.0, n_fock=30))
    traj = evolve_for(rho, LindbladGenerator(0.0), duration=1.0, n_samples=3)
    for r in traj.states:
        np.testing.assert_allclose(r, traj.states[0], rtol=0, atol=1e-15)
    assert LindbladGenerator(0.0).max_step(30) == math.inf


def test_generator_validation():
    with pytest.raises(ValueError):
        LindbladGenerator(-1.0)
    with pytest.raises(ValueError):
        LindbladGenerator(math.nan)
    assert LindbladGenerator.from_diffusion(4.0).rate == 1.0
    with pytest.raises(ValueError):
        evolve(np.eye(2) / 2, LindbladGenerator(1.0), dt=0.0, steps=1)
    with pytest.raises(ValueError):
        evolve_for(np.eye(2) / 2, LindbladGenerator(1.0), duration=1.0, n_samples=0)


def test_evolve_for_sampling():
    traj = evolve_for(np.eye(8) / 8, LindbladGenerator(2.0), duration=0.3, n_samples=6)
    assert len(traj.times) == 7
    np.testing.assert_allclose(traj.times, np.linspace(0, 0.3, 7), rtol=1e-12)
    assert np.all(traj.trace_error < 1e-12)


def test_trajectory_hygiene_and_csv(tmp_path):
    spec = CatStateSpec(1.5, n_fock=60)
    traj = evolve_for(build_cat_state(spec), LindbladGenerator(0.01), duration=2.0, n_samples=10)
    assert traj.min_eigenvalues().min() > -1e-8
    assert traj.hermiticity_errors().max() < 1e-14
    assert traj.final().dim == 60
    path = tmp_path / "traj.csv"
    traj.to_csv(path, spec.x0)
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["t", "visibility", "purity", "var_x", "var_p", "trace_error"]
    assert len(rows) == 12
    assert float(rows[1][1]) == 1.0
    assert all(len(c.split("e")[0].replace("-", "").replace(".", "")) == 17 for c in rows[2])


def test_python_fallback_matches_default(rng):
    rho = _random_density(rng, 20)
    gen = LindbladGenerator(0.2)
    a = evolve(rho, gen, dt=1e-3, steps=50).states[-1]
    b = evolve(rho, gen, dt=1e-3, steps=50, kernels=_kernels_py).states[-1]
    np.testing.assert_allclose(a, b, atol=1e-14)
