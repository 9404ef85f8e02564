"""Propagation directions, TT polarization tensors, antenna pattern and
solid-angle quadrature.

The detector arm lies along +x. Polarization tensors use the triad
``(u, v, k)`` with ``u = normalize(z x k)`` (``u = x`` near the poles) and
``v = k x u``; every physical output depends only on the polarization sum,
which does not depend on this choice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

POLARIZATIONS = ("plus", "cross")
_POLE_TOL = 1e-9
_J_NORM = (2.0 * math.pi) ** -1.5


@dataclass(frozen=True)
class Direction:
    """Unit propagation direction given by polar angle and azimuth (radians)."""

    theta: float
    phi: float
    n: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        st = math.sin(self.theta)
        n = np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])
        n.setflags(write=False)
        object.__setattr__(self, "n", n)

    @classmethod
    def from_vector(cls, vec) -> "Direction":
        v = np.asarray(vec, dtype=float)
        norm = np.linalg.norm(v)
        if not norm > 0:
            raise ValueError("direction vector must be non-zero")
        v = v / norm
        theta = math.acos(max(-1.0, min(1.0, v[2])))
        phi = math.atan2(v[1], v[0]) % (2.0 * math.pi)
        return cls(theta, phi)


@dataclass(frozen=True)
class PolarizationPair:
    tau_plus: np.ndarray
    tau_cross: np.ndarray

    def __getitem__(self, polarization: str) -> np.ndarray:
        if polarization == "plus":
            return self.tau_plus
        if polarization == "cross":
            return self.tau_cross
        raise KeyError(f"unknown polarization {polarization!r}")


def _triad(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Transverse vectors ``(u, v)`` for unit vectors ``n`` of shape (..., 3)."""
    n = np.asarray(n, dtype=float)
    zxn = np.stack([-n[..., 1], n[..., 0], np.zeros_like(n[..., 0])], axis=-1)
    norm = np.linalg.norm(zxn, axis=-1, keepdims=True)
    pole = norm[..., 0] < _POLE_TOL
    safe = np.where(norm > 0, norm, 1.0)
    # near the poles use x-hat with its component along n removed
    xh = np.array([1.0, 0.0, 0.0]) - n[..., :1] * n
    xh = xh / np.linalg.norm(xh, axis=-1, keepdims=True)
    u = np.where(pole[..., None], xh, zxn / safe)
    v = np.cross(n, u)
    return u, v


def polarization_tensors(direction: Direction) -> PolarizationPair:
    u, v = _triad(direction.n)
    tau_plus = (np.outer(u, u) - np.outer(v, v)) / math.sqrt(2.0)
    tau_cross = (np.outer(u, v) + np.outer(v, u)) / math.sqrt(2.0)
    return PolarizationPair(tau_plus, tau_cross)


def tau_xx(direction: Direction, polarization: str) -> float:
    """xx component of the selected polarization tensor."""
    return float(polarization_tensors(direction)[polarization][0, 0])


def tau_xx_squared(direction: Direction, polarization: str = "sum") -> float:
    """Squared xx component, or its sum over both polarizations for ``"sum"``."""
    if polarization == "sum":
        pair = polarization_tensors(direction)
        return float(pair.tau_plus[0, 0] ** 2 + pair.tau_cross[0, 0] ** 2)
    return tau_xx(direction, polarization) ** 2


def tau_xx_components(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized ``(tau_plus_xx, tau_cross_xx)`` for unit vectors of shape (..., 3)."""
    u, v = _triad(n)
    plus = (u[..., 0] ** 2 - v[..., 0] ** 2) / math.sqrt(2.0)
    cross = 2.0 * u[..., 0] * v[..., 0] / math.sqrt(2.0)
    return plus, cross


def tau_xx_squared_array(n: np.ndarray, polarization: str = "sum") -> np.ndarray:
    plus, cross = tau_xx_components(n)
    if polarization == "sum":
        return plus**2 + cross**2
    if polarization == "plus":
        return plus**2
    if polarization == "cross":
        return cross**2
    raise KeyError(f"unknown polarization {polarization!r}")


def tt_projector_xxxx(n: np.ndarray) -> np.ndarray:
    """TT projector component ``Lambda_xx,xx = 1/2 - n_x**2 + n_x**4 / 2``."""
    nx = np.asarray(n)[..., 0]
    return 0.5 - nx**2 + 0.5 * nx**4


def sinc(u):
    """Unnormalized ``sin(u)/u`` with ``sinc(0) = 1``."""
    return np.sinc(np.asarray(u) / np.pi)


def antenna_pattern(direction: Direction, polarization: str, k: float, L: float) -> complex:
    """Coupling ``J(k)`` of a plane-wave mode to a cavity of length ``L`` along x."""
    if k < 0:
        raise ValueError("wavenumber must be non-negative")
    if not L > 0:
        raise ValueError("arm length must be positive")
    half = 0.5 * k * direction.n[0] * L
    return complex(_J_NORM * tau_xx(direction, polarization) * sinc(half) * np.exp(1j * half))


@dataclass(frozen=True)
class SkyQuadrature:
    """Product Gauss-Legendre (in cos theta) x trapezoid (in phi) rule on the sphere."""

    n_theta: int = 32
    n_phi: int = 64
    theta: np.ndarray = field(init=False, repr=False, compare=False)
    phi: np.ndarray = field(init=False, repr=False, compare=False)
    vectors: np.ndarray = field(init=False, repr=False, compare=False)
    weights: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_theta < 1 or self.n_phi < 1:
            raise ValueError("quadrature needs at least one node per axis")
        mu, w_mu = np.polynomial.legendre.leggauss(self.n_theta)
        phi = 2.0 * math.pi * np.arange(self.n_phi) / self.n_phi
        mu_g, phi_g = np.meshgrid(mu, phi, indexing="ij")
        sin_t = np.sqrt(1.0 - mu_g**2)
        vectors = np.stack([sin_t * np.cos(phi_g), sin_t * np.sin(phi_g), mu_g], axis=-1)
        weights = np.repeat(w_mu[:, None], self.n_phi, axis=1) * (2.0 * math.pi / self.n_phi)
        for name, value in (
            ("theta", np.arccos(mu_g).ravel()),
            ("phi", phi_g.ravel()),
            ("vectors", vectors.reshape(-1, 3)),
            ("weights", weights.ravel()),
        ):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def scheme(self) -> str:
        return f"gauss-legendre({self.n_theta}) x trapezoid({self.n_phi})"

    @property
    def size(self) -> int:
        return self.weights.size

    def directions(self) -> list[Direction]:
        return [Direction(t, p) for t, p in zip(self.theta, self.phi)]

    def integrate(self, values: np.ndarray) -> float:
        """Weighted sum of node values (shape ``(size,)`` or ``(..., size)``)."""
        values = np.asarray(values, dtype=float)
        _check_finite(values, self)
        return values @ self.weights


def _check_finite(values: np.ndarray, quad: SkyQuadrature) -> None:
    bad = ~np.isfinite(values)
    if np.any(bad):
        idx = np.flatnonzero(bad.reshape(-1, quad.size).any(axis=0))
        nodes = ", ".join(f"(theta={quad.theta[i]:.6g}, phi={quad.phi[i]:.6g})" for i in idx[:5])
        raise FloatingPointError(f"non-finite integrand at {idx.size} node(s): {nodes}")


def sky_integral(f: Callable[[Direction], float], quad: SkyQuadrature) -> float:
    """Integrate a scalar function of direction over the unit sphere."""
    values = np.array([f(d) for d in quad.directions()], dtype=float)
    return float(quad.integrate(values))
