"""Physical constants and derived GW-field constants.

Constants are passed around explicitly so that tests can work in
G = c = hbar = 1 units. The open-systems code works in natural units
(hbar = 1, dimensionless quadratures x = alpha_1 / sqrt(hbar)); conversion
happens only where SI quantities enter or leave that module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants as _codata


@dataclass(frozen=True)
class PhysicalConstants:
    """Gravitational constant, light speed and reduced Planck constant."""

    G: float = _codata.G
    c: float = _codata.c
    hbar: float = _codata.hbar

    def __post_init__(self):
        for name in ("G", "c", "hbar"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and positive, got {value!r}")

    @classmethod
    def natural(cls) -> "PhysicalConstants":
        return cls(G=1.0, c=1.0, hbar=1.0)


CODATA = PhysicalConstants()


@dataclass(frozen=True)
class GwFieldConstants:
    """Constants of the quantized GW field derived from ``PhysicalConstants``."""

    constants: PhysicalConstants

    @property
    def M_G(self) -> float:
        return effective_mass(self.constants)


def effective_mass(constants: PhysicalConstants) -> float:
    """Effective mass parameter ``c**2 / (32 pi G)`` of a GW field mode (kg/m)."""
    return constants.c**2 / (32.0 * math.pi * constants.G)


def zero_point_strain(constants: PhysicalConstants, omega_k):
    """Zero-point strain amplitude ``sqrt(hbar / (2 M_G omega_k))``.

    Accepts a scalar or an array of angular frequencies; all must be positive.
    """
    omega = np.asarray(omega_k, dtype=float)
    if np.any(~(omega > 0)):
        raise ValueError("zero_point_strain requires omega_k > 0")
    value = np.sqrt(constants.hbar / (2.0 * effective_mass(constants) * omega))
    return float(value) if value.ndim == 0 else value
