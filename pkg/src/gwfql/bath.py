"""White-noise GW bath: spectra, the Markovian rate gamma_B, the phase-space
diffusion coefficient D and the cat-state decoherence rate.

All polarization dependence enters through the polarization-summed
``tau_xx**2``, the same sum used by the QFI in the identities below.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .qfim import GeneratorModel, point_qfi
from .sky import Direction, SkyQuadrature, sinc, tau_xx_squared_array
from .spectra import DetectorModel
from .units import PhysicalConstants, effective_mass


def thermal_S(direction: Direction, Omega: float, beta: float, L: float, constants: PhysicalConstants) -> float:
    """Per-direction bath strength of a thermal GW field at frequency ``Omega``."""
    if Omega == 0:
        raise ValueError("thermal_S is singular at Omega = 0; use high_temp_S for the white limit")
    if not beta > 0:
        raise ValueError("beta must be positive")
    return float(_thermal_S_array(direction.n, Omega, beta, L, constants))


def _thermal_S_array(n, Omega, beta, L, constants):
    hbar, c = constants.hbar, constants.c
    w = abs(Omega)
    x = beta * hbar * w
    bose = 1.0 / math.expm1(x)
    arm = sinc(w * np.asarray(n)[..., 0] * L / (2.0 * c))
    return (2.0 * math.pi) ** -3 * math.pi * hbar * w / (effective_mass(constants) * c**3) * bose * arm**2


def high_temp_S(beta: float, constants: PhysicalConstants) -> float:
    """High-temperature white limit ``4 G / (pi beta c**5)``."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    return 4.0 * constants.G / (math.pi * beta * constants.c**5)


@dataclass(frozen=True)
class BathModel:
    """Per-direction strength ``S_k`` of the bath.

    ``strength`` maps unit vectors of shape (N, 3) to N non-negative values.
    ``white`` marks baths valid for the Markovian master equation.
    """

    strength: Callable[[np.ndarray], np.ndarray]
    white: bool = True
    beta: float | None = None
    label: str = field(default="custom")

    def values(self, n: np.ndarray) -> np.ndarray:
        n = np.atleast_2d(np.asarray(n, dtype=float))
        out = np.broadcast_to(np.asarray(self.strength(n), dtype=float), n.shape[:-1]).copy()
        if np.any(~np.isfinite(out)) or np.any(out < 0):
            raise ValueError(f"bath strength must be finite and non-negative ({self.label})")
        return out

    def at(self, direction: Direction) -> float:
        return float(self.values(direction.n[None, :])[0])

    def scaled(self, factor: float) -> "BathModel":
        fn = self.strength
        return BathModel(lambda n: factor * np.asarray(fn(n)), self.white, self.beta, f"{factor:g}*{self.label}")

    @classmethod
    def isotropic(cls, s: float) -> "BathModel":
        if not s >= 0:
            raise ValueError("bath strength must be non-negative")
        return cls(lambda n: np.full(np.shape(n)[:-1], float(s)), label=f"isotropic({s:g})")

    @classmethod
    def thermal_high_temperature(cls, beta: float, constants: PhysicalConstants) -> "BathModel":
        s = high_temp_S(beta, constants)
        return cls(lambda n: np.full(np.shape(n)[:-1], s), beta=beta, label=f"thermal-high-T(beta={beta:g})")

    @classmethod
    def thermal(cls, beta: float, Omega: float, L: float, constants: PhysicalConstants) -> "BathModel":
        """Thermal strength at one frequency; coloured, so rejected by the solver."""
        if Omega == 0:
            raise ValueError("Omega must be non-zero")
        return cls(
            lambda n: _thermal_S_array(n, Omega, beta, L, constants),
            white=False,
            beta=beta,
            label=f"thermal(beta={beta:g},Omega={Omega:g})",
        )

    @classmethod
    def cap(cls, s: float, axis, half_angle: float) -> "BathModel":
        """Strength ``s`` inside a cone of ``half_angle`` around ``axis``, zero outside."""
        a = np.asarray(axis, dtype=float)
        a = a / np.linalg.norm(a)
        cos_edge = math.cos(half_angle)
        return cls(lambda n: np.where(np.asarray(n) @ a >= cos_edge, float(s), 0.0), label=f"cap({s:g},{half_angle:g})")

    @classmethod
    def from_function(cls, f: Callable[[Direction], float], white: bool = True) -> "BathModel":
        def strength(n):
            return np.array([f(Direction.from_vector(v)) for v in np.atleast_2d(n)])

        return cls(strength, white=white, label=getattr(f, "__name__", "function"))


def gamma_B(bath: BathModel, quad: SkyQuadrature) -> float:
    """Markovian bath rate ``(1/2) int dk tau_xx**2 S_k``."""
    return 0.5 * float(quad.integrate(tau_xx_squared_array(quad.vectors, "sum") * bath.values(quad.vectors)))


def diffusion_coefficient(model: DetectorModel, gamma_b: float) -> float:
    """Momentum-diffusion coefficient ``(4/hbar)(omega0 alpha_bar/2)**2 gamma_B``."""
    if gamma_b < 0:
        raise ValueError("gamma_B must be non-negative")
    return 4.0 / model.hbar * model.coupling**2 * gamma_b


def diffusion_density(model: DetectorModel, bath: BathModel, n: np.ndarray) -> np.ndarray:
    """``dD/dk = (2/hbar)(omega0 alpha_bar/2)**2 tau_xx**2 S_k`` at unit vectors ``n``."""
    n = np.atleast_2d(n)
    return 2.0 / model.hbar * model.coupling**2 * tau_xx_squared_array(n, "sum") * bath.values(n)


def vacuum_qfi(model: DetectorModel, direction: Direction) -> float:
    """Point QFI of the vacuum (``<alpha_1^2> = hbar/2``), polarization summed."""
    return point_qfi(0.5 * model.hbar, GeneratorModel(model, direction, "sum"))


def cat_qfi(model: DetectorModel, direction: Direction, x0: float) -> float:
    """Point QFI of a cat with ``<Delta alpha_1^2> = hbar x0**2``, polarization summed."""
    return point_qfi(model.hbar * x0**2, GeneratorModel(model, direction, "sum"))


@dataclass
class DecoherenceReport:
    gamma_B: float
    D: float
    x0: float
    gamma_dec: float
    gamma_dec_from_qfi: float
    directions: np.ndarray
    dD_dk: np.ndarray
    dD_dk_from_qfi: np.ndarray
    dgamma_dec_dk: np.ndarray
    dgamma_dec_dk_from_qfi: np.ndarray

    @property
    def max_relative_deviation(self) -> float:
        pairs = [
            (self.gamma_dec, self.gamma_dec_from_qfi),
            (self.dD_dk, self.dD_dk_from_qfi),
            (self.dgamma_dec_dk, self.dgamma_dec_dk_from_qfi),
        ]
        return max(relative_deviation(a, b) for a, b in pairs)

    def to_json(self) -> dict:
        def q(value, unit):
            return {"value": value, "unit": unit}

        return {
            "gamma_B": q(self.gamma_B, "s^-1 (alpha_1-covariance rate)"),
            "D": q(self.D, "s^-1"),
            "x0": q(self.x0, "dimensionless (alpha_1/sqrt(hbar))"),
            "gamma_dec": q(self.gamma_dec, "s^-1"),
            "gamma_dec_from_qfi": q(self.gamma_dec_from_qfi, "s^-1"),
            "max_relative_deviation": q(self.max_relative_deviation, "dimensionless"),
            "direction_samples": [
                {
                    "theta": q(float(t), "rad"),
                    "phi": q(float(p), "rad"),
                    "dD_dk": q(float(a), "s^-1 sr^-1"),
                    "dD_dk_from_qfi": q(float(b), "s^-1 sr^-1"),
                    "dgamma_dec_dk": q(float(c), "s^-1 sr^-1"),
                    "dgamma_dec_dk_from_qfi": q(float(d), "s^-1 sr^-1"),
                }
                for (t, p), a, b, c, d in zip(
                    self.directions, self.dD_dk, self.dD_dk_from_qfi, self.dgamma_dec_dk, self.dgamma_dec_dk_from_qfi
                )
            ],
        }


def relative_deviation(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    scale = np.maximum(np.abs(a), np.abs(b))
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(scale > 0, np.abs(a - b) / np.where(scale > 0, scale, 1.0), 0.0)
    return float(np.max(rel, initial=0.0))


def decoherence_prediction(
    model: DetectorModel,
    bath: BathModel,
    x0: float,
    quad: SkyQuadrature,
    sample_directions: list[Direction] | None = None,
) -> DecoherenceReport:
    """Predicted diffusion and cat decoherence, computed two independent ways.

    The bath route goes through gamma_B and D; the QFI route integrates
    ``F_vac S_k`` and ``F_cat S_k / 2`` over directions.
    """
    gb = gamma_B(bath, quad)
    D = diffusion_coefficient(model, gb)
    gamma_dec = D * x0**2

    dirs = sample_directions if sample_directions is not None else quad.directions()
    n = np.array([d.n for d in dirs]).reshape(-1, 3)
    S = bath.values(n) if len(dirs) else np.zeros(0)
    dD = diffusion_density(model, bath, n) if len(dirs) else np.zeros(0)
    dD_qfi = np.array([vacuum_qfi(model, d) for d in dirs]) * S
    dgamma = dD * x0**2
    dgamma_qfi = 0.5 * np.array([cat_qfi(model, d, x0) for d in dirs]) * S

    # QFI route for the total rate: integrate F_cat S / 2 over the full quadrature
    all_dirs = quad.directions()
    f_cat = np.array([cat_qfi(model, d, x0) for d in all_dirs])
    gamma_dec_qfi = float(quad.integrate(0.5 * f_cat * bath.values(quad.vectors)))

    return DecoherenceReport(
        gamma_B=gb,
        D=D,
        x0=x0,
        gamma_dec=gamma_dec,
        gamma_dec_from_qfi=gamma_dec_qfi,
        directions=np.array([(d.theta, d.phi) for d in dirs]).reshape(-1, 2),
        dD_dk=dD,
        dD_dk_from_qfi=dD_qfi,
        dgamma_dec_dk=dgamma,
        dgamma_dec_dk_from_qfi=dgamma_qfi,
    )
