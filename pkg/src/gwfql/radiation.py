"""GW power and graviton emission driven by amplitude-quadrature fluctuations.

The per-channel density ``dP/d^3k = (G/(pi^2 c^2)) (omega0 alpha_bar/2)^2
tau_xx^2 S(c|k|)`` (polarization summed) is the primitive. The total power
and its prefactor relative to ``(omega0 alpha_bar/2)^2 int dOmega/2pi
Omega^2 S`` are reconstructed by quadrature rather than assumed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .qfim import GeneratorModel, point_qfi
from .sky import Direction, SkyQuadrature, tau_xx_squared_array
from .spectra import DetectorModel, NoiseSpectrum
from .units import effective_mass, zero_point_strain

CLOSED_FORM_PREFACTOR = 32.0 / 15.0  # in units of G/c^5
TAIL_TOLERANCE = 1e-6


class ConvergenceError(ArithmeticError):
    pass


def _unit(k_vec) -> tuple[np.ndarray, np.ndarray]:
    k_vec = np.asarray(k_vec, dtype=float)
    k = np.linalg.norm(k_vec, axis=-1)
    if np.any(~(k > 0)):
        raise ValueError("wavevector must be non-zero")
    return k_vec / k[..., None], k


def _density(model: DetectorModel, n: np.ndarray, s_alpha1: np.ndarray) -> np.ndarray:
    G, c = model.constants.G, model.constants.c
    return G / (math.pi**2 * c**2) * model.coupling**2 * tau_xx_squared_array(n, "sum") * s_alpha1


def channel_power_density(model: DetectorModel, psd: NoiseSpectrum, k_vec):
    """Radiated power per unit wavevector volume, W / (rad/m)^3.

    ``k_vec`` is a single wavevector or an array of shape (..., 3); the PSD
    is interpolated linearly at ``omega_k = c |k|``.
    """
    n, k = _unit(k_vec)
    out = _density(model, n, np.asarray(psd.at(model.constants.c * k)))
    return float(out) if out.ndim == 0 else out


def reciprocity_density(model: DetectorModel, psd: NoiseSpectrum, k_vec):
    """``(hbar^2 G / (4 pi^2 c^2)) F_k(omega_k)`` with the polarization-summed QFIM.

    Goes through ``qfim.GeneratorModel`` per point so it shares no code with
    ``channel_power_density`` beyond the PSD interpolation.
    """
    hbar, G, c = model.hbar, model.constants.G, model.constants.c
    n, k = _unit(k_vec)
    flat_n, flat_k = n.reshape(-1, 3), np.atleast_1d(k).ravel()
    out = np.empty(flat_k.size)
    for i, (ni, ki) in enumerate(zip(flat_n, flat_k)):
        F = point_qfi(psd.at(c * ki), GeneratorModel(model, Direction.from_vector(ni), "sum"))
        out[i] = hbar**2 * G / (4.0 * math.pi**2 * c**2) * F
    return float(out[0]) if np.ndim(k) == 0 else out.reshape(np.shape(k))


def graviton_rate_forms(model: DetectorModel, psd: NoiseSpectrum, k_vec) -> tuple[np.ndarray, np.ndarray]:
    """Both closed forms of the graviton emission rate per unit wavevector volume."""
    constants = model.constants
    hbar = constants.hbar
    n, k = _unit(k_vec)
    omega_k = constants.c * k
    F = 4.0 / hbar**2 * model.coupling**2 * tau_xx_squared_array(n, "sum") * np.asarray(psd.at(omega_k))
    via_mass = hbar / (128.0 * math.pi**3 * effective_mass(constants) * omega_k) * F
    via_zero_point = 0.125 * zero_point_strain(constants, omega_k) ** 2 / (2.0 * math.pi) ** 3 * F
    return via_mass, via_zero_point


def graviton_rate_density(model: DetectorModel, psd: NoiseSpectrum, k_vec, rtol: float = 1e-12):
    """Gravitons emitted per second per unit wavevector volume."""
    a, b = graviton_rate_forms(model, psd, k_vec)
    scale = np.maximum(np.abs(a), np.abs(b))
    if np.any(np.abs(a - b) > rtol * scale):
        raise ArithmeticError("graviton-rate closed forms disagree")
    return float(a) if np.ndim(a) == 0 else a


@dataclass
class RadiationReport:
    total_power: float
    effective_prefactor: float
    prefactor_over_G_c5: float
    closed_form_ratio: float
    frequency_moment: float
    tail_fraction: float
    converged: bool
    channel_density_samples: list = field(default_factory=list)
    graviton_rate_samples: list = field(default_factory=list)

    def to_json(self) -> dict:
        def q(value, unit):
            if isinstance(value, float) and not math.isfinite(value):
                value = None
            return {"value": value, "unit": unit}

        return {
            "total_power": q(self.total_power, "W"),
            "effective_prefactor": q(self.effective_prefactor, "s^3 kg^-1 m^-2"),
            "prefactor_over_G_c5": q(self.prefactor_over_G_c5, "dimensionless"),
            "closed_form_prefactor_over_G_c5": q(CLOSED_FORM_PREFACTOR, "dimensionless"),
            "closed_form_ratio": q(self.closed_form_ratio, "dimensionless"),
            "frequency_moment": q(self.frequency_moment, "kg^2 m^4 s^-6"),
            "tail_fraction": q(self.tail_fraction, "dimensionless"),
            "converged": self.converged,
            "channel_density_samples": [
                {
                    "theta": q(s["theta"], "rad"),
                    "phi": q(s["phi"], "rad"),
                    "k": q(s["k"], "rad m^-1"),
                    "value": q(s["value"], "W (rad/m)^-3"),
                }
                for s in self.channel_density_samples
            ],
            "graviton_rate_samples": [
                {
                    "theta": q(s["theta"], "rad"),
                    "phi": q(s["phi"], "rad"),
                    "k": q(s["k"], "rad m^-1"),
                    "value": q(s["value"], "s^-1 (rad/m)^-3"),
                }
                for s in self.graviton_rate_samples
            ],
        }


def total_power(
    model: DetectorModel,
    psd: NoiseSpectrum,
    quad: SkyQuadrature,
    sample_directions: list[Direction] | None = None,
    n_k_samples: int = 8,
    strict: bool = True,
) -> RadiationReport:
    """Integrate the channel density over ``d^3k = k^2 dk dOmega_k``.

    The radial grid is the PSD grid mapped through ``k = omega/c``. The
    contribution of the last decade of that grid must be below
    ``TAIL_TOLERANCE`` of the total, otherwise ``ConvergenceError`` is
    raised (or ``converged`` is False when ``strict`` is off).
    """
    c, G = model.constants.c, model.constants.G
    omega = psd.omega
    k = omega / c
    s = psd.values
    # density(k_hat, k) on the (sky node, k node) product grid
    density = _density(model, quad.vectors[:, None, :], s[None, :])
    radial = quad.integrate(density.T) * k**2
    total = float(np.trapezoid(radial, k))

    tail = k >= k[-1] / 10.0
    tail_power = float(np.trapezoid(radial[tail], k[tail])) if tail.sum() > 1 else 0.0
    tail_fraction = tail_power / total if total > 0 else 0.0
    converged = tail_fraction < TAIL_TOLERANCE
    if strict and not converged:
        raise ConvergenceError(
            f"radiated power not converged: last decade carries {tail_fraction:.3e} of the total"
        )

    moment = model.coupling**2 * psd.integrate(omega**2)
    prefactor = total / moment if moment > 0 else math.nan
    over_G_c5 = prefactor / (G / c**5) if moment > 0 else math.nan

    samples, rates = [], []
    if sample_directions:
        positive = np.flatnonzero(omega > 0)
        pick = positive[np.unique(np.linspace(0, positive.size - 1, n_k_samples).astype(int))]
        for d in sample_directions:
            for i in pick:
                k_vec = d.n * k[i]
                density_value = float(_density(model, d.n, s[i]))
                a, _ = graviton_rate_forms(model, psd, k_vec)
                samples.append({"theta": d.theta, "phi": d.phi, "k": float(k[i]), "value": density_value})
                rates.append({"theta": d.theta, "phi": d.phi, "k": float(k[i]), "value": float(a)})

    return RadiationReport(
        total_power=total,
        effective_prefactor=prefactor,
        prefactor_over_G_c5=over_G_c5,
        closed_form_ratio=over_G_c5 / CLOSED_FORM_PREFACTOR,
        frequency_moment=moment,
        tail_fraction=tail_fraction,
        converged=converged,
        channel_density_samples=samples,
        graviton_rate_samples=rates,
    )
