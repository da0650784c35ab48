# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 stepping kernel; same contract as ``_kernel_py.advance``
with the adjacency passed in CSR form."""

from libc.math cimport fabs, isfinite
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline void _delayed(double[:, ::1] Y, double[:, ::1] DL, double[:, ::1] DR,
                          Py_ssize_t k, Py_ssize_t o, const double[:] w,
                          double[::1] out, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t a = k + o, i
    cdef double w0 = w[0], w1 = w[1], w2 = w[2], w3 = w[3]
    for i in range(n):
        out[i] = w0 * Y[a, i] + w1 * DR[a, i] + w2 * Y[a + 1, i] + w3 * DL[a + 1, i]


cdef inline void _rhs(double[:, ::1] Y, double[:, ::1] DL, double[:, ::1] DR,
                      Py_ssize_t k, Py_ssize_t s, double[::1] ys,
                      const double[::1] K, const double[::1] Aval, const int[::1] Acol,
                      const int[::1] Aptr, const double[::1] cD,
                      const long[:, ::1] off, const double[:, :, ::1] wts, const int[::1] zero,
                      double[::1] yr, double[::1] yp, double[::1] out,
                      Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, p
    cdef double acc
    cdef double[::1] r = ys
    cdef double[::1] q = ys
    if not zero[0]:
        _delayed(Y, DL, DR, k, off[0, s], wts[0, s], yr, n)
        r = yr
    if not zero[1]:
        _delayed(Y, DL, DR, k, off[1, s], wts[1, s], yp, n)
        q = yp
    for i in range(n):
        acc = 0.0
        for p in range(Aptr[i], Aptr[i + 1]):
            acc += Aval[p] * r[Acol[p]]
        out[i] = -K[i] * ys[i] + acc - cD[i] * q[i]


def advance(double[:, ::1] Y, double[:, ::1] DL, double[:, ::1] DR,
            Py_ssize_t k0, Py_ssize_t nsteps, double h,
            const double[::1] K, const double[::1] Aval, const int[::1] Acol,
            const int[::1] Aptr, const double[::1] D, double c,
            const long[:, ::1] off, const double[:, :, ::1] wts, const int[::1] zero,
            double cap):
    cdef Py_ssize_t n = Y.shape[1], i, k
    cdef double half = 0.5 * h, sixth = h / 6.0, big
    cdef double[::1] cD = np.multiply(c, D)
    cdef double[::1] k2 = np.empty(n), k3 = np.empty(n), k4 = np.empty(n)
    cdef double[::1] ys = np.empty(n), yr = np.empty(n), yp = np.empty(n)
    cdef bint diverged = False
    cdef Py_ssize_t done = nsteps
    with nogil:
        _rhs(Y, DL, DR, k0, 0, Y[k0], K, Aval, Acol, Aptr, cD, off, wts, zero,
             yr, yp, DR[k0], n)
        for k in range(k0, k0 + nsteps):
            for i in range(n):
                ys[i] = Y[k, i] + half * DR[k, i]
            _rhs(Y, DL, DR, k, 1, ys, K, Aval, Acol, Aptr, cD, off, wts, zero, yr, yp, k2, n)
            for i in range(n):
                ys[i] = Y[k, i] + half * k2[i]
            _rhs(Y, DL, DR, k, 1, ys, K, Aval, Acol, Aptr, cD, off, wts, zero, yr, yp, k3, n)
            for i in range(n):
                ys[i] = Y[k, i] + h * k3[i]
            _rhs(Y, DL, DR, k, 2, ys, K, Aval, Acol, Aptr, cD, off, wts, zero, yr, yp, k4, n)
            big = 0.0
            for i in range(n):
                Y[k + 1, i] = Y[k, i] + sixth * (DR[k, i] + 2.0 * (k2[i] + k3[i]) + k4[i])
                if not isfinite(Y[k + 1, i]):
                    big = cap * 2.0 + 1.0
                elif fabs(Y[k + 1, i]) > big:
                    big = fabs(Y[k + 1, i])
            if big > cap:
                diverged = True
                done = k + 1 - k0
                break
            _rhs(Y, DL, DR, k + 1, 0, Y[k + 1], K, Aval, Acol, Aptr, cD, off, wts, zero,
                 yr, yp, DR[k + 1], n)
            for i in range(n):
                DL[k + 1, i] = DR[k + 1, i]
    return done, diverged
