# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the truncated-Fock Lindblad solver and Wigner transform.

Signatures match ``_kernels_py``. The x operator is tridiagonal with zero
diagonal, so ``[x, [x, rho]] = x^2 rho - 2 x rho x + rho x^2`` is a 9-point
stencil. Matrices are stored with a two-cell zero border so the stencil has no
boundary branches, and only the upper triangle is computed: every RK stage
is Hermitian.
"""
import numpy as np

from libc.math cimport exp, sqrt, M_PI

DEF PAD = 2


cdef struct Stencil:
    Py_ssize_t N
    double *d     # (x^2)_{m,m}, padded
    double *e     # (x^2)_{m,m+2}, padded
    double *o     # x_{m,m+1}, padded


cdef void _rhs_upper(const double complex *P, Py_ssize_t S, Stencil st, double lam,
                     double complex *out) noexcept nogil:
    # out[m, n] = -lam [x, [x, P]]_{mn} for n >= m, padded row stride S
    cdef Py_ssize_t m, n, i, j
    cdef double complex x2r, rx2, xrx
    for m in range(st.N):
        i = m + PAD
        for n in range(m, st.N):
            j = n + PAD
            x2r = st.d[i] * P[i * S + j] + st.e[i] * P[(i + 2) * S + j] + st.e[i - 2] * P[(i - 2) * S + j]
            rx2 = st.d[j] * P[i * S + j] + st.e[j] * P[i * S + j + 2] + st.e[j - 2] * P[i * S + j - 2]
            xrx = (st.o[i - 1] * (st.o[j - 1] * P[(i - 1) * S + j - 1] + st.o[j] * P[(i - 1) * S + j + 1])
                   + st.o[i] * (st.o[j - 1] * P[(i + 1) * S + j - 1] + st.o[j] * P[(i + 1) * S + j + 1]))
            out[i * S + j] = -lam * (x2r - 2.0 * xrx + rx2)


cdef void _mirror(double complex *P, Py_ssize_t S, Py_ssize_t N) noexcept nogil:
    cdef Py_ssize_t m, n
    for m in range(N):
        P[(m + PAD) * S + m + PAD] = P[(m + PAD) * S + m + PAD].real
        for n in range(m + 1, N):
            P[(n + PAD) * S + m + PAD] = P[(m + PAD) * S + n + PAD].conjugate()


def _coefficients(off, Py_ssize_t N):
    o = np.zeros(N + 2 * PAD)
    o[PAD:PAD + N - 1] = off
    d = np.zeros(N + 2 * PAD)
    e = np.zeros(N + 2 * PAD)
    for m in range(N):
        d[m + PAD] = o[m + PAD - 1] ** 2 + o[m + PAD] ** 2
        e[m + PAD] = o[m + PAD] * o[m + PAD + 1]
    return d, e, o


def _padded(rho, Py_ssize_t N):
    P = np.zeros((N + 2 * PAD, N + 2 * PAD), dtype=np.complex128)
    P[PAD:PAD + N, PAD:PAD + N] = rho
    return P


def lindblad_rhs(rho, off, double lam):
    r = np.asarray(rho, dtype=np.complex128)
    cdef Py_ssize_t N = r.shape[0]
    cdef Py_ssize_t S = N + 2 * PAD
    d, e, o = _coefficients(np.asarray(off, dtype=np.float64), N)
    cdef double[::1] dv = d, ev = e, ov = o
    P = _padded(r, N)
    out = np.zeros_like(P)
    cdef double complex[:, ::1] Pv = P, Ov = out
    cdef Stencil st
    st.N, st.d, st.e, st.o = N, &dv[0], &ev[0], &ov[0]
    # general (not necessarily Hermitian) input: apply to the Hermitian and anti-Hermitian parts
    herm = 0.5 * (P + P.conj().T)
    anti = 0.5j * (P - P.conj().T)  # P = herm - i anti, with anti Hermitian
    cdef double complex[:, ::1] Hv = herm, Av = anti
    result = np.empty((N, N), dtype=np.complex128)
    outA = np.zeros_like(P)
    cdef double complex[:, ::1] OAv = outA
    with nogil:
        _rhs_upper(&Hv[0, 0], S, st, lam, &Ov[0, 0])
        _mirror(&Ov[0, 0], S, N)
        _rhs_upper(&Av[0, 0], S, st, lam, &OAv[0, 0])
        _mirror(&OAv[0, 0], S, N)
    result[:] = out[PAD:PAD + N, PAD:PAD + N] - 1j * outA[PAD:PAD + N, PAD:PAD + N]
    return result


def rk4_propagate(rho, off, double lam, double dt, long steps):
    r = np.asarray(rho, dtype=np.complex128)
    cdef Py_ssize_t N = r.shape[0]
    cdef Py_ssize_t S = N + 2 * PAD
    d, e, o = _coefficients(np.asarray(off, dtype=np.float64), N)
    cdef double[::1] dv = d, ev = e, ov = o
    R = _padded(0.5 * (r + r.conj().T), N)
    cdef double complex[:, ::1] Rv = R
    cdef double complex[:, ::1] Tv = np.zeros_like(R)
    cdef double complex[:, ::1] Kv = np.zeros_like(R)
    cdef double complex[:, ::1] Av = np.zeros_like(R)
    cdef double complex *Rp = &Rv[0, 0]
    cdef double complex *Tp = &Tv[0, 0]
    cdef double complex *Kp = &Kv[0, 0]
    cdef double complex *Ap = &Av[0, 0]
    cdef Stencil st
    st.N, st.d, st.e, st.o = N, &dv[0], &ev[0], &ov[0]
    cdef double w[4]
    cdef double c[4]
    w[0], w[1], w[2], w[3] = dt / 6.0, dt / 3.0, dt / 3.0, dt / 6.0
    c[0], c[1], c[2], c[3] = 0.5 * dt, 0.5 * dt, dt, 0.0
    cdef Py_ssize_t m, n, idx, stage
    cdef long s
    with nogil:
        for s in range(steps):
            for m in range(N):
                for n in range(m, N):
                    idx = (m + PAD) * S + n + PAD
                    Ap[idx] = Rp[idx]
            _rhs_upper(Rp, S, st, lam, Kp)
            for stage in range(4):
                if stage > 0:
                    _rhs_upper(Tp, S, st, lam, Kp)
                for m in range(N):
                    for n in range(m, N):
                        idx = (m + PAD) * S + n + PAD
                        Ap[idx] = Ap[idx] + w[stage] * Kp[idx]
                        if stage < 3:
                            Tp[idx] = Rp[idx] + c[stage] * Kp[idx]
                if stage < 3:
                    _mirror(Tp, S, N)
            for m in range(N):
                for n in range(m, N):
                    idx = (m + PAD) * S + n + PAD
                    Rp[idx] = Ap[idx]
            _mirror(Rp, S, N)
    return np.array(R[PAD:PAD + N, PAD:PAD + N])


def wigner_grid(rho, xvec, pvec):
    cdef double complex[:, ::1] r = np.ascontiguousarray(rho, dtype=np.complex128)
    cdef const double[::1] xs = np.ascontiguousarray(xvec, dtype=np.float64)
    cdef const double[::1] ps = np.ascontiguousarray(pvec, dtype=np.float64)
    cdef Py_ssize_t N = r.shape[0]
    cdef Py_ssize_t nx = xs.shape[0], npts = ps.shape[0]
    out = np.empty((npts, nx), dtype=np.float64)
    cdef double[:, ::1] W = out
    cdef double complex[::1] wl = np.empty(N, dtype=np.complex128)
    cdef double[::1] sq = np.sqrt(np.arange(N, dtype=np.float64))
    isq_arr = np.zeros(N)
    isq_arr[1:] = 1.0 / np.sqrt(np.arange(1, N, dtype=np.float64))
    cdef double[::1] isq = isq_arr
    cdef Py_ssize_t ip, ix, m, n
    cdef double complex A, A2, A2c, temp, temp2
    cdef double acc, w0
    cdef double inv_sqrt2 = 1.0 / sqrt(2.0)
    with nogil:
        for ip in range(npts):
            for ix in range(nx):
                A = (xs[ix] + 1j * ps[ip]) * inv_sqrt2
                A2 = 2.0 * A
                A2c = A2.conjugate()
                w0 = exp(-(xs[ix] * xs[ix] + ps[ip] * ps[ip])) / M_PI
                wl[0] = w0
                acc = r[0, 0].real * w0
                for n in range(1, N):
                    wl[n] = A2 * wl[n - 1] * isq[n]
                    acc = acc + 2.0 * (r[0, n] * wl[n]).real
                for m in range(1, N):
                    temp = wl[m]
                    wl[m] = (A2c * temp - sq[m] * wl[m - 1]) * isq[m]
                    acc = acc + (r[m, m] * wl[m]).real
                    for n in range(m + 1, N):
                        temp2 = (A2 * wl[n - 1] - sq[m] * temp) * isq[n]
                        temp = wl[n]
                        wl[n] = temp2
                        acc = acc + 2.0 * (r[m, n] * wl[n]).real
                W[ip, ix] = acc
    return out
