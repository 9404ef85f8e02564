"""Quantum Fisher information for the detector-referred GW parameter xi and
the resulting quantum Cramer-Rao bound.

The signal generator is ``-(omega0 alpha_bar / 2) tau_xx alpha_1``, so every
QFI here is ``(4/hbar**2) (omega0 alpha_bar/2)**2 tau_xx**2`` times an
alpha_1 second moment (a variance, an autocovariance or a PSD).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .sky import Direction, sinc, tau_xx_squared
from .spectra import DetectorModel, FrequencyGrid, NoiseSpectrum

UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class GeneratorModel:
    """Detector plus signal direction and polarization selector.

    ``polarization`` is ``"plus"``, ``"cross"`` or ``"sum"``. ``tau_xx_sq``
    overrides the antenna projection (e.g. 1 for a normalized coupling).
    """

    detector: DetectorModel
    direction: Direction | None = None
    polarization: str = "plus"
    tau_xx_sq: float | None = None

    def __post_init__(self):
        if self.tau_xx_sq is None and self.direction is None:
            raise ValueError("need a direction or an explicit tau_xx_sq")
        if self.polarization not in ("plus", "cross", "sum"):
            raise ValueError(f"unknown polarization {self.polarization!r}")

    @property
    def projection(self) -> float:
        if self.tau_xx_sq is not None:
            return float(self.tau_xx_sq)
        return tau_xx_squared(self.direction, self.polarization)

    @property
    def prefactor(self) -> float:
        """``(4/hbar**2)(omega0 alpha_bar/2)**2 tau_xx**2``."""
        hbar = self.detector.hbar
        return 4.0 / hbar**2 * self.detector.coupling**2 * self.projection


def point_qfi(variance_alpha1: float, model: GeneratorModel) -> float:
    """Equal-time QFI from the alpha_1 variance."""
    if variance_alpha1 < 0:
        raise ValueError("variance must be non-negative")
    return model.prefactor * variance_alpha1


def qfim_time_kernel(autocov: Callable[[float, float], float], model: GeneratorModel) -> Callable[[float, float], float]:
    """Two-time QFIM kernel ``F(t, t')`` from the symmetrized alpha_1 autocovariance."""
    prefactor = model.prefactor

    def kernel(t, tp):
        return prefactor * autocov(t, tp)

    return kernel


@dataclass(frozen=True)
class QfimSpectrum:
    grid: FrequencyGrid
    values: np.ndarray
    source: NoiseSpectrum

    @property
    def omega(self) -> np.ndarray:
        return self.grid.omega

    def integrate(self) -> float:
        return self.grid.integrate(self.values)


def qfim_spectrum(psd: NoiseSpectrum, model: GeneratorModel) -> QfimSpectrum:
    return QfimSpectrum(psd.grid, model.prefactor * psd.values, psd)


@dataclass(frozen=True)
class BoundSpectrum:
    """Lower bound on the estimation-error PSD; ``inf`` where F = 0."""

    grid: FrequencyGrid
    values: np.ndarray
    unbounded: np.ndarray

    @property
    def no_information(self) -> bool:
        return bool(np.all(self.unbounded))

    def serializable(self) -> list:
        return [UNBOUNDED if u else float(v) for v, u in zip(self.values, self.unbounded)]


def qcrb_bound(F: QfimSpectrum) -> BoundSpectrum:
    values = np.asarray(F.values, dtype=float)
    unbounded = ~(values > 0)
    with np.errstate(divide="ignore"):
        bound = np.where(unbounded, np.inf, 1.0 / np.where(unbounded, 1.0, values))
    return BoundSpectrum(F.grid, bound, unbounded)


@dataclass(frozen=True)
class SignalProjection:
    xi: np.ndarray
    direction: Direction
    L: float

    def is_real(self, rtol: float = 1e-12) -> bool:
        scale = max(float(np.max(np.abs(self.xi), initial=0.0)), np.finfo(float).tiny)
        return bool(np.max(np.abs(self.xi.imag), initial=0.0) <= rtol * scale)


def project_signal(hbar_samples, k_grid, direction: Direction, L: float) -> SignalProjection:
    """Reduce radial strain samples ``h(t, k)`` to the parameter ``xi(t)``.

    ``hbar_samples`` has shape ``(n_times, n_k)`` (or ``(n_k,)``) and is
    integrated over ``k_grid`` with the trapezoid rule, weighted by
    ``k**2 sinc(k L mu/2) exp(i k L mu/2) / (2 pi)**1.5`` where ``mu`` is the
    cosine of the angle between the propagation direction and the arm (x).
    """
    k = np.asarray(k_grid, dtype=float)
    if k.size == 0:
        raise ValueError("empty k grid")
    h = np.atleast_2d(np.asarray(hbar_samples))
    if h.shape[-1] != k.size:
        raise ValueError("strain samples do not match the k grid")
    half = 0.5 * k * L * direction.n[0]
    weight = k**2 * sinc(half) * np.exp(1j * half) / (2.0 * math.pi) ** 1.5
    if k.size == 1:
        xi = np.zeros(h.shape[0], dtype=complex)
    else:
        xi = np.trapezoid(h * weight, k, axis=-1)
    return SignalProjection(np.asarray(xi, dtype=complex), direction, L)
