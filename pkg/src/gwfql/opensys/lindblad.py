"""Fixed-step RK4 evolution of ``d rho/dt = Lam (2 x rho x - x^2 rho - rho x^2)``.

``Lam`` is a rate in s^-1 acting on the dimensionless quadrature
``x = alpha_1 / sqrt(hbar)``; it equals a quarter of the diffusion
coefficient D, so the Wigner function obeys ``dW/dt = Lam d^2W/dp^2``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .. import bath as _bath
from ..sky import SkyQuadrature
from ..spectra import DetectorModel
from ._backend import kernels as _default_kernels
from .errors import StabilityError, SolverError
from .states import FockDensityMatrix, p_operator, x_offdiag, x_operator

STABILITY_FACTOR = 0.05
TRACE_DRIFT_PER_RATE_TIME = 1e-9


@dataclass(frozen=True)
class LindbladGenerator:
    rate: float
    provenance: str = "explicit"

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate >= 0):
            raise ValueError("Lindblad rate must be finite and non-negative")

    @classmethod
    def from_diffusion(cls, D: float) -> "LindbladGenerator":
        return cls(D / 4.0, provenance=f"D/4 with D={D:.17g} s^-1")

    @classmethod
    def from_bath(cls, model: DetectorModel, bath: "_bath.BathModel", quad: SkyQuadrature) -> "LindbladGenerator":
        if not bath.white:
            raise ValueError(f"bath {bath.label} is coloured; the Markovian solver needs a white bath")
        D = _bath.diffusion_coefficient(model, _bath.gamma_B(bath, quad))
        return cls(D / 4.0, provenance=f"bath {bath.label}: D/4 with D={D:.17g} s^-1")

    def max_step(self, n_fock: int) -> float:
        return math.inf if self.rate == 0 else STABILITY_FACTOR / (self.rate * n_fock)


@dataclass
class Trajectory:
    times: np.ndarray
    states: list[np.ndarray]
    generator: LindbladGenerator
    trace_error: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.trace_error is None:
            self.trace_error = np.array([abs(np.trace(r) - 1.0) for r in self.states])

    @property
    def n_fock(self) -> int:
        return self.states[0].shape[0]

    def final(self) -> FockDensityMatrix:
        return FockDensityMatrix(self.states[-1], validate=False)

    def expect(self, op) -> np.ndarray:
        return np.array([np.real(np.trace(r @ op)) for r in self.states])

    def variance(self, op) -> np.ndarray:
        return self.expect(op @ op) - self.expect(op) ** 2

    def purity(self) -> np.ndarray:
        return np.array([FockDensityMatrix(r, validate=False).purity() for r in self.states])

    def min_eigenvalues(self) -> np.ndarray:
        return np.array([FockDensityMatrix(r, validate=False).min_eigenvalue() for r in self.states])

    def hermiticity_errors(self) -> np.ndarray:
        return np.array([FockDensityMatrix(r, validate=False).hermiticity_error() for r in self.states])

    def to_csv(self, path: str | Path, x0: float) -> None:
        """Write ``t,visibility,purity,var_x,var_p,trace_error`` rows."""
        from .analysis import trajectory_visibility

        n = self.n_fock
        vis = trajectory_visibility(self, x0)
        columns = (
            self.times,
            vis,
            self.purity(),
            self.variance(x_operator(n)),
            self.variance(p_operator(n)),
            self.trace_error,
        )
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "visibility", "purity", "var_x", "var_p", "trace_error"])
            for row in zip(*columns):
                writer.writerow([f"{v:.16e}" for v in row])


def _as_matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, FockDensityMatrix) else np.asarray(rho, dtype=complex)


def evolve(rho, generator: LindbladGenerator, dt: float, steps: int, record_every: int = 1, kernels=None) -> Trajectory:
    """Integrate ``steps`` RK4 steps of size ``dt``, recording every ``record_every``.

    Raises ``StabilityError`` if ``dt > 0.05/(Lam N_f)`` and ``SolverError``
    if the trace drifts by more than ``1e-9`` per unit ``Lam t``.
    """
    kernels = kernels or _default_kernels
    r0 = np.ascontiguousarray(_as_matrix(rho))
    n = r0.shape[0]
    if dt <= 0 or steps < 0 or record_every < 1:
        raise ValueError("need dt > 0, steps >= 0 and record_every >= 1")
    if dt > generator.max_step(n) * (1 + 1e-12):
        raise StabilityError(
            f"dt={dt:.3e} exceeds stability bound {generator.max_step(n):.3e} (0.05/(Lam N_f))"
        )
    off = x_offdiag(n)
    trace0 = np.trace(r0)
    times, states = [0.0], [r0.copy()]
    current, done = r0, 0
    while done < steps:
        chunk = min(record_every, steps - done)
        current = kernels.rk4_propagate(current, off, generator.rate, dt, chunk)
        done += chunk
        t = done * dt
        drift = abs(np.trace(current) - trace0)
        allowed = TRACE_DRIFT_PER_RATE_TIME * max(generator.rate * t, 1.0)
        if not np.all(np.isfinite(current)) or drift > allowed:
            raise SolverError(f"trace drift {drift:.3e} at t={t:.3e} exceeds {allowed:.3e}")
        times.append(t)
        states.append(current.copy())
    return Trajectory(np.array(times), states, generator)


def evolve_for(rho, generator: LindbladGenerator, duration: float, n_samples: int, kernels=None) -> Trajectory:
    """Evolve to ``duration`` with ``n_samples`` equally spaced records.

    The step size is the largest one dividing each sample interval that
    satisfies the stability bound.
    """
    if n_samples < 1 or duration <= 0:
        raise ValueError("need duration > 0 and n_samples >= 1")
    n = _as_matrix(rho).shape[0]
    interval = duration / n_samples
    substeps = max(1, math.ceil(interval / generator.max_step(n) - 1e-12)) if generator.rate > 0 else 1
    return evolve(rho, generator, interval / substeps, substeps * n_samples, record_every=substeps, kernels=kernels)
