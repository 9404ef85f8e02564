"""Coherence, decoherence-rate and purity diagnostics for cat-state runs.

Cross-packet coherence is measured with the x-translation by ``2 x0``:
``C = Tr(rho exp(-2 i x0 p))`` picks out ``|chi_-><chi_+|``-type terms and,
under pure momentum diffusion, decays exactly as ``exp(-4 Lam x0^2 t)`` for
any packet width.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from .errors import CoherenceError
from .lindblad import LindbladGenerator, Trajectory, evolve
from .states import CatStateSpec, FockDensityMatrix, annihilation, build_cat_state, x_operator
from .wigner import WignerGrid

PURE_TOL = 1e-8
MIN_VISIBILITY = 0.2
MIN_FIT_SAMPLES = 10


@lru_cache(maxsize=32)
def translation_operator(n_fock: int, shift: float) -> np.ndarray:
    """``exp(-i shift p)`` restricted to the first ``n_fock`` levels.

    Built as a displacement in an enlarged basis so the retained block is
    free of truncation error.
    """
    alpha = abs(shift) / math.sqrt(2.0)
    reach = math.sqrt(n_fock) + alpha
    big = int(n_fock + reach**2 + 10 * reach + 50)
    a = annihilation(big)
    gen = (shift / math.sqrt(2.0)) * (a.T - a)
    out = expm(gen)[:n_fock, :n_fock].astype(complex)
    out.setflags(write=False)
    return out


def cross_coherence(rho, x0: float) -> complex:
    """``<exp(-2 i x0 p)>`` from a density matrix or a sampled Wigner function."""
    if isinstance(rho, WignerGrid):
        phase = np.exp(-2j * x0 * rho.p)[:, None]
        return complex(np.trapezoid(np.trapezoid(rho.W * phase, rho.x, axis=1), rho.p))
    m = rho.matrix if isinstance(rho, FockDensityMatrix) else np.asarray(rho)
    return complex(np.trace(m @ translation_operator(m.shape[0], 2.0 * x0)))


def fringe_visibility(rho, x0: float, reference=None) -> float:
    """Cross-packet coherence normalized to ``reference`` (default: the ideal even cat)."""
    if reference is None:
        n = 60 if isinstance(rho, WignerGrid) else np.shape(getattr(rho, "matrix", rho))[0]
        reference = build_cat_state(CatStateSpec(x0 / math.sqrt(2.0), n_fock=n))
    c0 = abs(cross_coherence(reference, x0))
    if c0 < 1e-12:
        raise CoherenceError("reference state carries no cross-packet coherence")
    return abs(cross_coherence(rho, x0)) / c0


def trajectory_visibility(traj: Trajectory, x0: float) -> np.ndarray:
    T = translation_operator(traj.n_fock, 2.0 * x0)
    c = np.array([abs(np.trace(r @ T)) for r in traj.states])
    if c[0] < 1e-12:
        raise CoherenceError("initial state carries no cross-packet coherence")
    return c / c[0]


@dataclass(frozen=True)
class RateFit:
    rate: float
    intercept: float
    residual: float
    n_used: int
    predicted: float | None = None

    @property
    def relative_deviation(self) -> float | None:
        if self.predicted is None or self.predicted == 0:
            return None
        return self.rate / self.predicted - 1.0


def decoherence_rate_fit(times, visibility, x0: float, D: float | None = None) -> RateFit:
    """Least-squares slope of ``-log(visibility)`` against time.

    Only samples with visibility in [0.2, 1] are used; at least ten are
    required. With ``D`` the prediction ``D x0**2`` is attached.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(visibility, dtype=float)
    keep = (v >= MIN_VISIBILITY) & (v <= 1.0 + 1e-9)
    if keep.sum() < MIN_FIT_SAMPLES:
        raise CoherenceError(
            f"only {int(keep.sum())} samples with visibility >= {MIN_VISIBILITY}; need {MIN_FIT_SAMPLES}"
        )
    y = -np.log(v[keep])
    slope, intercept = np.polyfit(t[keep], y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * t[keep] + intercept)) ** 2)))
    predicted = None if D is None else D * x0**2
    return RateFit(float(slope), float(intercept), resid, int(keep.sum()), predicted)


def fit_trajectory(traj: Trajectory, x0: float) -> RateFit:
    return decoherence_rate_fit(traj.times, trajectory_visibility(traj, x0), x0, D=4.0 * traj.generator.rate)


def purity_decay_rate(rho, generator: LindbladGenerator) -> float:
    """``d Tr(rho^2)/dt`` at t = 0 for a pure state: ``-4 Lam Var(x)``."""
    state = rho if isinstance(rho, FockDensityMatrix) else FockDensityMatrix(rho)
    if state.purity() < 1.0 - PURE_TOL:
        raise ValueError("purity_decay_rate needs a pure state")
    return -4.0 * generator.rate * state.variance(x_operator(state.dim))


def purity_decay_rate_fd(rho, generator: LindbladGenerator, step: float | None = None, kernels=None) -> float:
    """Second-order forward difference of the purity along ``evolve``."""
    m = rho.matrix if isinstance(rho, FockDensityMatrix) else np.asarray(rho, dtype=complex)
    if generator.rate == 0:
        return 0.0
    h = step if step is not None else min(generator.max_step(m.shape[0]), 1e-6 / generator.rate)
    traj = evolve(m, generator, h, 2, kernels=kernels)
    f0, f1, f2 = traj.purity()
    return (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h)
