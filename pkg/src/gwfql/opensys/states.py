"""Truncated Fock-space operators and states in natural units (hbar = 1).

``a = (x + i p)/sqrt(2)`` so a coherent state ``|beta>`` with real beta sits
at ``x = sqrt(2) beta``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln
from scipy.stats import poisson

from .errors import TruncationError

TAIL_BOUND = 1e-10


def annihilation(n_fock: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_fock, dtype=float)), k=1)


def x_offdiag(n_fock: int) -> np.ndarray:
    """Super-diagonal of the (zero-diagonal, symmetric) x operator."""
    return np.sqrt(np.arange(1, n_fock, dtype=float) / 2.0)


def x_operator(n_fock: int) -> np.ndarray:
    a = annihilation(n_fock)
    return (a + a.T) / math.sqrt(2.0)


def p_operator(n_fock: int) -> np.ndarray:
    a = annihilation(n_fock)
    return (a - a.T) / (1j * math.sqrt(2.0))


class FockDensityMatrix:
    """Density operator in a truncated number basis."""

    TRACE_TOL = 1e-10
    HERMITIAN_TOL = 1e-12
    POSITIVITY_TOL = -1e-8

    def __init__(self, matrix, validate: bool = True):
        rho = np.array(matrix, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError("density matrix must be square")
        self.matrix = rho
        if validate:
            self.validate()

    @classmethod
    def from_ket(cls, psi) -> "FockDensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix.conj().T, self.matrix)))

    def expect(self, op) -> float:
        return float(np.real(np.trace(self.matrix @ op)))

    def variance(self, op) -> float:
        return self.expect(op @ op) - self.expect(op) ** 2

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T))[0])

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def validate(self) -> None:
        if abs(self.trace() - 1.0) > self.TRACE_TOL:
            raise ValueError(f"trace {self.trace():.3e} differs from 1")
        if self.hermiticity_error() > self.HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian")
        if self.min_eigenvalue() < self.POSITIVITY_TOL:
            raise ValueError("density matrix has a negative eigenvalue")


def coherent_ket(beta: complex, n_fock: int) -> np.ndarray:
    """Unnormalized-by-truncation coherent amplitudes ``exp(-|b|^2/2) b^n / sqrt(n!)``."""
    n = np.arange(n_fock)
    if beta == 0:
        out = np.zeros(n_fock, dtype=complex)
        out[0] = 1.0
        return out
    log_mag = -0.5 * abs(beta) ** 2 + n * math.log(abs(beta)) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag) * np.exp(1j * n * np.angle(beta))


@dataclass(frozen=True)
class CatStateSpec:
    """Cat ``|beta_c> + exp(i phase) |-beta_c>`` with real displacement ``beta_c``."""

    beta_c: float
    phase: float = 0.0
    n_fock: int = 60

    @property
    def x0(self) -> float:
        return math.sqrt(2.0) * self.beta_c

    def tail_mass(self) -> float:
        """Upper bound on the norm outside the truncated basis."""
        b2 = self.beta_c**2
        norm = 1.0 + math.cos(self.phase) * math.exp(-2.0 * b2)
        if norm <= 0:
            return 0.0
        return float(min(1.0, 2.0 * poisson.sf(self.n_fock - 1, b2) / norm))


def cat_ket(spec: CatStateSpec) -> np.ndarray:
    if spec.n_fock < 1:
        raise ValueError("n_fock must be positive")
    tail = spec.tail_mass()
    if tail > TAIL_BOUND:
        raise TruncationError(
            f"n_fock={spec.n_fock} too small for beta_c={spec.beta_c}: tail mass {tail:.3e} > {TAIL_BOUND:g}"
        )
    psi = coherent_ket(spec.beta_c, spec.n_fock) + np.exp(1j * spec.phase) * coherent_ket(-spec.beta_c, spec.n_fock)
    norm = np.linalg.norm(psi)
    if norm < 1e-12:
        raise ValueError("cat components cancel; state undefined")
    return psi / norm


def build_cat_state(spec: CatStateSpec) -> FockDensityMatrix:
    """Normalized cat of two ground-state-width packets at ``x = +/- x0``."""
    return FockDensityMatrix.from_ket(cat_ket(spec))


def dephased_cat(spec: CatStateSpec) -> FockDensityMatrix:
    """Equal statistical mixture of the two cat packets (no cross coherence)."""
    plus = coherent_ket(spec.beta_c, spec.n_fock)
    minus = coherent_ket(-spec.beta_c, spec.n_fock)
    plus, minus = plus / np.linalg.norm(plus), minus / np.linalg.norm(minus)
    return FockDensityMatrix(0.5 * (np.outer(plus, plus.conj()) + np.outer(minus, minus.conj())))


def cat_x_moment(beta_c: float) -> float:
    """Closed-form ``<x^2>`` of the even coherent cat: ``beta^2 (1 + tanh beta^2) + 1/2``."""
    b2 = beta_c**2
    return b2 * (1.0 + math.tanh(b2)) + 0.5
