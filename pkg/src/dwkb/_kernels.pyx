# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-cell loops; semantics identical to ``_kernels_py``."""
import numpy as np
cimport numpy as cnp

cdef extern from "complex.h":
    double cabs(double complex)

cnp.import_array()

POLE_TOL = 1e-12


def propagate(const double complex[:, :, ::1] T, const double complex[:, ::1] F, y0):
    cdef Py_ssize_t n = T.shape[0], i
    out = np.empty((n + 1, 2), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef double complex a = y0[0], b = y0[1], na
    o[0, 0] = a
    o[0, 1] = b
    for i in range(n):
        na = T[i, 0, 0] * a + T[i, 0, 1] * b + F[i, 0]
        b = T[i, 1, 0] * a + T[i, 1, 1] * b + F[i, 1]
        a = na
        o[i + 1, 0] = a
        o[i + 1, 1] = b
    return out


def cascade(const double complex[:, :, ::1] S):
    cdef Py_ssize_t n = S.shape[0], i
    cum = np.full((n + 1, 2, 2), np.nan, dtype=np.complex128)
    cdef double complex[:, :, ::1] c = cum
    cdef double complex a11 = 0, a12 = 1, a21 = 1, a22 = 0
    cdef double complex c11, c12, c21, c22, den, n11, n12, n21, n22
    cdef double tol = POLE_TOL
    c[0, 0, 0] = a11
    c[0, 0, 1] = a12
    c[0, 1, 0] = a21
    c[0, 1, 1] = a22
    for i in range(n):
        c11 = S[i, 0, 0]
        c12 = S[i, 0, 1]
        c21 = S[i, 1, 0]
        c22 = S[i, 1, 1]
        den = 1.0 - a22 * c11
        if cabs(den) < tol:
            return cum, i
        n11 = a11 + a12 * c11 * a21 / den
        n12 = a12 * c12 / den
        n21 = c21 * a21 / den
        n22 = c22 + c21 * a22 * c12 / den
        a11, a12, a21, a22 = n11, n12, n21, n22
        c[i + 1, 0, 0] = a11
        c[i + 1, 0, 1] = a12
        c[i + 1, 1, 0] = a21
        c[i + 1, 1, 1] = a22
    return cum, -1


def iterate(const double complex[::1] f1, const double complex[::1] f0,
            const double complex[::1] forcing, ya, yb):
    cdef Py_ssize_t n = f1.shape[0], j
    y = np.empty(n + 2, dtype=np.complex128)
    cdef double complex[::1] v = y
    v[0] = ya
    v[1] = yb
    for j in range(n):
        v[j + 2] = -f1[j] * v[j + 1] - f0[j] * v[j] - forcing[j]
    return y


def pair_roots(const double complex[::1] ra, const double complex[::1] rb):
    cdef Py_ssize_t n = ra.shape[0], i
    r1 = np.empty(n, dtype=np.complex128)
    r2 = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] o1 = r1, o2 = r2
    cdef double complex p1, p2
    cdef double same, swap
    if n == 0:
        return r1, r2
    if ra[0].imag >= rb[0].imag:
        o1[0] = ra[0]
        o2[0] = rb[0]
    else:
        o1[0] = rb[0]
        o2[0] = ra[0]
    for i in range(1, n):
        p1 = o1[i - 1]
        p2 = o2[i - 1]
        same = cabs(ra[i] - p1) + cabs(rb[i] - p2)
        swap = cabs(rb[i] - p1) + cabs(ra[i] - p2)
        if swap < same:
            o1[i] = rb[i]
            o2[i] = ra[i]
        else:
            o1[i] = ra[i]
            o2[i] = rb[i]
    return r1, r2
