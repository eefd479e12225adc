"""Pure-Python sequential kernels.

Reference implementations of the per-cell loops. ``_kernels.pyx`` mirrors
these one-to-one; the package picks the compiled version when it imports.
All arrays are ``complex128`` and C-contiguous.
"""
import numpy as np

# star-product denominators below this magnitude are treated as poles
POLE_TOL = 1e-12


def propagate(T, F, y0):
    """Run ``x_k = T_k x_{k-1} + F_k`` from ``x_0 = y0``.

    Returns an ``(n + 1, 2)`` array whose first row is ``y0``.
    """
    n = T.shape[0]
    out = np.empty((n + 1, 2), dtype=np.complex128)
    a, b = complex(y0[0]), complex(y0[1])
    out[0, 0], out[0, 1] = a, b
    for i in range(n):
        t = T[i]
        a, b = (t[0, 0] * a + t[0, 1] * b + F[i, 0],
                t[1, 0] * a + t[1, 1] * b + F[i, 1])
        out[i + 1, 0], out[i + 1, 1] = a, b
    return out


def cascade(S):
    """Cumulative star products of a chain of 2x2 scattering matrices.

    ``cum[0]`` is the pass-through matrix and ``cum[i + 1] = cum[i] * S[i]``.
    Returns ``(cum, pole)`` where ``pole`` is the index into ``S`` of the
    first cell whose composition hit a pole, or -1. Rows after a pole are
    left as NaN.
    """
    n = S.shape[0]
    cum = np.full((n + 1, 2, 2), np.nan, dtype=np.complex128)
    a11, a12, a21, a22 = 0j, 1 + 0j, 1 + 0j, 0j
    cum[0] = ((a11, a12), (a21, a22))
    for i in range(n):
        c11, c12 = S[i, 0, 0], S[i, 0, 1]
        c21, c22 = S[i, 1, 0], S[i, 1, 1]
        den = 1.0 - a22 * c11
        if abs(den) < POLE_TOL:
            return cum, i
        a11, a12, a21, a22 = (a11 + a12 * c11 * a21 / den,
                              a12 * c12 / den,
                              c21 * a21 / den,
                              c22 + c21 * a22 * c12 / den)
        cum[i + 1] = ((a11, a12), (a21, a22))
    return cum, -1


def iterate(f1, f0, forcing, ya, yb):
    """Forward iteration of ``y[j+2] = -f1[j] y[j+1] - f0[j] y[j] - forcing[j]``."""
    n = f1.shape[0]
    y = np.empty(n + 2, dtype=np.complex128)
    y[0], y[1] = ya, yb
    for j in range(n):
        y[j + 2] = -f1[j] * y[j + 1] - f0[j] * y[j] - forcing[j]
    return y


def pair_roots(ra, rb):
    """Order two root sequences into continuous branches.

    The first cell puts the root with the larger imaginary part on branch 1;
    every later cell takes the pairing with the smaller summed distance to
    the previous cell's roots.
    """
    n = ra.shape[0]
    r1 = np.empty(n, dtype=np.complex128)
    r2 = np.empty(n, dtype=np.complex128)
    if n == 0:
        return r1, r2
    if ra[0].imag >= rb[0].imag:
        r1[0], r2[0] = ra[0], rb[0]
    else:
        r1[0], r2[0] = rb[0], ra[0]
    for i in range(1, n):
        p1, p2 = r1[i - 1], r2[i - 1]
        same = abs(ra[i] - p1) + abs(rb[i] - p2)
        swap = abs(rb[i] - p1) + abs(ra[i] - p2)
        if swap < same:
            r1[i], r2[i] = rb[i], ra[i]
        else:
            r1[i], r2[i] = ra[i], rb[i]
    return r1, r2
