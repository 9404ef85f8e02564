"""Wigner transform of truncated-Fock states (hbar = 1, vacuum W(0,0) = 1/pi)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels as _default_kernels
from .states import FockDensityMatrix, p_operator, x_operator

NORM_TOL = 1e-6
GROUND_WIDTH = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class WignerGrid:
    """Wigner function sampled as ``W[ip, ix]`` on ``x`` by ``p``."""

    x: np.ndarray
    p: np.ndarray
    W: np.ndarray

    def normalization(self) -> float:
        return float(np.trapezoid(np.trapezoid(self.W, self.x, axis=1), self.p))

    def at_x(self, x_value: float) -> np.ndarray:
        """Slice along p at the grid column nearest ``x_value``."""
        return self.W[:, int(np.argmin(np.abs(self.x - x_value)))]


def required_extent(state: FockDensityMatrix) -> float:
    """Half-width the grid must reach: phase-space radius plus five ground widths."""
    n = state.dim
    radius = math.sqrt(max(state.expect(x_operator(n) @ x_operator(n)) + state.expect(p_operator(n) @ p_operator(n)), 0.0))
    return radius + 5.0 * GROUND_WIDTH


def wigner_transform(rho, xvec, pvec, check: bool = True, kernels=None) -> WignerGrid:
    """Sample the Wigner function on the rectangular grid ``xvec`` by ``pvec``.

    With ``check`` the grid must span the state's support and the result
    must integrate to one within 1e-6.
    """
    kernels = kernels or _default_kernels
    state = rho if isinstance(rho, FockDensityMatrix) else FockDensityMatrix(rho, validate=False)
    x = np.asarray(xvec, dtype=float)
    p = np.asarray(pvec, dtype=float)
    if check:
        need = required_extent(state)
        have = min(-x[0], x[-1], -p[0], p[-1])
        if have < need:
            raise ValueError(f"grid half-width {have:.3g} does not cover the state (needs {need:.3g})")
    W = np.asarray(kernels.wigner_grid(np.ascontiguousarray(state.matrix), x, p))
    grid = WignerGrid(x, p, W)
    if check:
        norm = grid.normalization()
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"Wigner normalization {norm:.8f} off by more than {NORM_TOL:g}")
    return grid


def default_axis(state: FockDensityMatrix, n: int = 201, margin: float = 1.0) -> np.ndarray:
    half = required_extent(state) + margin
    return np.linspace(-half, half, n)
