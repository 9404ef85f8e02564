"""Amplitude-quadrature noise spectra, frequency grids and classical
reference limits (SQL, Mizuno integral, energetic quantum limit).

All spectra are two-sided and symmetric, sampled on the non-negative half
axis. Frequency integrals ``int dOmega/2pi`` over the full axis are twice
the trapezoid over the sampled half.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .units import CODATA, PhysicalConstants

CSV_HEADER = ("omega_rad_s", "S_alpha1")


@dataclass(frozen=True)
class DetectorModel:
    """Single strongly pumped arm cavity.

    ``alpha_bar`` is the classical amplitude-quadrature component in
    alpha_1 units (sqrt(J s)); the mean photon number follows as
    ``alpha_bar**2 / (2 hbar)``.
    """

    omega0: float
    alpha_bar: float
    L: float
    M: float
    gamma_cav: float
    squeeze_r: float = 0.0
    constants: PhysicalConstants = CODATA

    def __post_init__(self):
        for name in ("omega0", "L", "M", "gamma_cav"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and positive, got {value!r}")
        if not math.isfinite(self.alpha_bar):
            raise ValueError("alpha_bar must be finite")
        if not math.isfinite(self.squeeze_r):
            raise ValueError("squeeze_r must be finite")

    @classmethod
    def from_photon_number(cls, N_photons: float, **kwargs) -> "DetectorModel":
        constants = kwargs.get("constants", CODATA)
        if not N_photons >= 0:
            raise ValueError("N_photons must be non-negative")
        return cls(alpha_bar=math.sqrt(2.0 * constants.hbar * N_photons), **kwargs)

    @property
    def hbar(self) -> float:
        return self.constants.hbar

    @property
    def N_photons(self) -> float:
        return self.alpha_bar**2 / (2.0 * self.hbar)

    @property
    def coupling(self) -> float:
        """Generator prefactor ``omega0 * alpha_bar / 2``."""
        return 0.5 * self.omega0 * self.alpha_bar

    @property
    def intracavity_energy(self) -> float:
        return self.N_photons * self.hbar * self.omega0


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing, non-negative angular frequencies (rad/s)."""

    omega: np.ndarray
    spacing: str = "custom"

    def __post_init__(self):
        omega = np.array(self.omega, dtype=float)
        if omega.ndim != 1 or omega.size < 2:
            raise ValueError("frequency grid needs at least two points")
        if not np.all(np.isfinite(omega)):
            raise ValueError("frequency grid must be finite")
        if omega[0] < 0:
            raise ValueError("frequency grid lives on the non-negative half axis")
        if np.any(np.diff(omega) <= 0):
            raise ValueError("frequency grid must be strictly increasing")
        omega.setflags(write=False)
        object.__setattr__(self, "omega", omega)

    @classmethod
    def log(cls, omega_min: float, omega_max: float, n: int, include_zero: bool = True) -> "FrequencyGrid":
        if not 0 < omega_min < omega_max:
            raise ValueError("need 0 < omega_min < omega_max")
        omega = np.geomspace(omega_min, omega_max, n)
        if include_zero:
            omega = np.concatenate([[0.0], omega])
        return cls(omega, spacing=f"log[{omega_min:.6g},{omega_max:.6g}]x{n}" + ("+0" if include_zero else ""))

    def __len__(self) -> int:
        return self.omega.size

    def same_as(self, other: "FrequencyGrid") -> bool:
        return self.omega.shape == other.omega.shape and np.array_equal(self.omega, other.omega)

    def integrate(self, values) -> float:
        """``int_{-inf}^{inf} dOmega/2pi`` of a symmetric integrand sampled on the grid."""
        values = np.asarray(values, dtype=float)
        return 2.0 * float(np.trapezoid(values, self.omega)) / (2.0 * math.pi)


@dataclass(frozen=True)
class NoiseSpectrum:
    """Two-sided symmetric PSD sampled on a ``FrequencyGrid``."""

    grid: FrequencyGrid
    values: np.ndarray
    symmetric: bool = True
    label: str = field(default="", compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != self.grid.omega.shape:
            raise ValueError("spectrum values must match the grid")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("PSD samples must be finite and non-negative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def omega(self) -> np.ndarray:
        return self.grid.omega

    def at(self, omega):
        """Linear interpolation at ``|omega|``; outside the sampled band raises."""
        w = np.abs(np.asarray(omega, dtype=float))
        lo, hi = self.grid.omega[0], self.grid.omega[-1]
        slack = 1e-12 * hi
        if np.any((w < lo - slack) | (w > hi + slack)):
            raise ValueError(
                f"frequency outside tabulated band [{lo:.6g}, {hi:.6g}] rad/s; extrapolation refused"
            )
        out = np.interp(w, self.grid.omega, self.values)
        return float(out) if out.ndim == 0 else out

    def integrate(self, weight=None) -> float:
        values = self.values if weight is None else self.values * np.asarray(weight)
        return self.grid.integrate(values)

    def scaled(self, factor: float) -> "NoiseSpectrum":
        return NoiseSpectrum(self.grid, self.values * factor, self.symmetric, self.label)


def lorentzian_alpha1_psd(model: DetectorModel, grid: FrequencyGrid, cutoff_omega: float | None = None) -> NoiseSpectrum:
    """Single-pole amplitude-quadrature PSD with frequency-independent squeezing.

    ``S(Omega) = exp(2 r) hbar gamma / (gamma**2 + Omega**2)``, normalized so
    that the unsqueezed total variance is the vacuum value ``hbar/2``. An
    optional Gaussian roll-off ``exp(-(Omega/cutoff)**2)`` makes high moments
    such as ``int Omega**2 S`` converge.
    """
    gamma = model.gamma_cav
    w = grid.omega
    values = math.exp(2.0 * model.squeeze_r) * model.hbar * gamma / (gamma**2 + w**2)
    if cutoff_omega is not None:
        if not cutoff_omega > 0:
            raise ValueError("cutoff_omega must be positive")
        values = values * np.exp(-((w / cutoff_omega) ** 2))
    return NoiseSpectrum(grid, values, label="lorentzian")


def read_psd_csv(path: str | Path) -> NoiseSpectrum:
    """Load a tabulated ``omega_rad_s,S_alpha1`` file (Omega >= 0 rows)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(h.strip() for h in next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"expected header {','.join(CSV_HEADER)}, got {','.join(header)}")
        rows = [(float(a), float(b)) for a, b in reader if a.strip()]
    data = np.array(rows, dtype=float)
    return NoiseSpectrum(FrequencyGrid(data[:, 0], spacing="tabulated"), data[:, 1], label=str(path))


def write_psd_csv(path: str | Path, spectrum: NoiseSpectrum) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for w, s in zip(spectrum.omega, spectrum.values):
            writer.writerow([f"{w:.16e}", f"{s:.16e}"])


def sql_strain_psd(model: DetectorModel, Omega):
    """Free-mass standard quantum limit ``8 hbar / (M Omega**2 L**2)``."""
    w = np.asarray(Omega, dtype=float)
    if np.any(w == 0):
        raise ValueError("SQL is singular at Omega = 0")
    out = 8.0 * model.hbar / (model.M * w**2 * model.L**2)
    return float(out) if out.ndim == 0 else out


def mizuno_functional(grid: FrequencyGrid, inv_Sh) -> float:
    """Area ``int dOmega/2pi 1/S_h`` over the two-sided axis.

    ``inv_Sh`` is either an array sampled on ``grid`` or a callable of Omega.
    """
    values = inv_Sh(grid.omega) if callable(inv_Sh) else np.asarray(inv_Sh, dtype=float)
    if values.shape != grid.omega.shape:
        raise ValueError("integrand does not match grid")
    if not np.all(np.isfinite(values)):
        raise ValueError("integrand must be finite on the grid")
    return grid.integrate(values)


def mizuno_bound(model: DetectorModel) -> float:
    """Right-hand side ``N omega0**2`` of the Mizuno area bound."""
    return model.N_photons * model.omega0**2


def energy_psd(model: DetectorModel, psd: NoiseSpectrum) -> NoiseSpectrum:
    """Intracavity energy PSD for linearized fluctuations ``dE = omega0 alpha_bar d alpha_1``."""
    return psd.scaled((model.omega0 * model.alpha_bar) ** 2)


@dataclass(frozen=True)
class EqlReport:
    pointwise: np.ndarray
    margin: float
    passed: bool
    integrated_energy_term: float
    coherent_reference: float | None = None

    @property
    def coherent_ratio(self) -> float | None:
        if self.coherent_reference is None:
            return None
        return self.integrated_energy_term / self.coherent_reference


def eql_check(S_E: NoiseSpectrum, S_h: NoiseSpectrum, hbar: float = CODATA.hbar, model: DetectorModel | None = None) -> EqlReport:
    """Check ``1/S_h <= S_E/hbar**2`` pointwise.

    ``margin`` is the smallest ratio ``(S_E/hbar**2) / (1/S_h)``; passing
    requires margin >= 1. With ``model`` the integrated energy term is
    compared against the coherent-state value ``E**2/(hbar**2 N)``.
    """
    if not S_E.grid.same_as(S_h.grid):
        raise ValueError("S_E and S_h must share a frequency grid")
    rhs = S_E.values / hbar**2
    with np.errstate(divide="ignore"):
        lhs = np.where(S_h.values > 0, 1.0 / S_h.values, np.inf)
    pointwise = lhs <= rhs
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(lhs > 0, rhs / lhs, np.inf)
    margin = float(np.min(ratio))
    integrated = S_E.grid.integrate(rhs)
    reference = None
    if model is not None:
        E = model.intracavity_energy
        reference = E**2 / (hbar**2 * model.N_photons) if model.N_photons > 0 else 0.0
    return EqlReport(pointwise, margin, bool(np.all(pointwise)), integrated, reference)
