"""Pure numpy kernels; same signatures as the compiled ``_kernels`` module."""
import numpy as np


def _comm_x(A, off):
    """[x, A] for tridiagonal x with zero diagonal and super/sub-diagonal ``off``."""
    xa = np.zeros_like(A)
    xa[1:, :] += off[:, None] * A[:-1, :]
    xa[:-1, :] += off[:, None] * A[1:, :]
    ax = np.zeros_like(A)
    ax[:, 1:] += A[:, :-1] * off[None, :]
    ax[:, :-1] += A[:, 1:] * off[None, :]
    return xa - ax


def lindblad_rhs(rho, off, lam):
    """``lam (2 x rho x - x^2 rho - rho x^2) = -lam [x, [x, rho]]``."""
    return -lam * _comm_x(_comm_x(rho, off), off)


def rk4_propagate(rho, off, lam, dt, steps):
    rho = np.array(rho, dtype=complex, order="C")
    off = np.asarray(off, dtype=float)
    for _ in range(int(steps)):
        k1 = lindblad_rhs(rho, off, lam)
        k2 = lindblad_rhs(rho + 0.5 * dt * k1, off, lam)
        k3 = lindblad_rhs(rho + 0.5 * dt * k2, off, lam)
        k4 = lindblad_rhs(rho + dt * k3, off, lam)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
    return rho


def wigner_grid(rho, xvec, pvec):
    """Wigner function (hbar = 1) on the grid ``W[ip, ix]`` by Laguerre recursion.

    Uses ``W = sum_mn rho_mn W_nm`` where ``W_nm`` is the Wigner function of
    ``|n><m|``; the recursion runs over ``alpha = (x + i p)/sqrt(2)``.
    """
    rho = np.asarray(rho, dtype=complex)
    N = rho.shape[0]
    X, P = np.meshgrid(np.asarray(xvec, float), np.asarray(pvec, float))
    A = (X + 1j * P) / np.sqrt(2.0)
    A2 = 2.0 * A
    w_list = [None] * N
    w_list[0] = np.exp(-2.0 * np.abs(A) ** 2) / np.pi
    W = rho[0, 0].real * w_list[0]
    for n in range(1, N):
        w_list[n] = A2 * w_list[n - 1] / np.sqrt(n)
        W = W + 2.0 * np.real(rho[0, n] * w_list[n])
    for m in range(1, N):
        temp = w_list[m]
        w_list[m] = (np.conj(A2) * temp - np.sqrt(m) * w_list[m - 1]) / np.sqrt(m)
        W = W + np.real(rho[m, m] * w_list[m])
        for n in range(m + 1, N):
            temp2 = (A2 * w_list[n - 1] - np.sqrt(m) * temp) / np.sqrt(n)
            temp = w_list[n]
            w_list[n] = temp2
            W = W + 2.0 * np.real(rho[m, n] * w_list[n])
    return np.real(W)
