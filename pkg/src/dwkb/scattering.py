"""Per-cell scattering matrices, their cascade, and profile reconstruction.

Port convention for a segment from cell ``a`` to cell ``b``::

    (y2[a], y1[b]) = S (y1[a], y2[b])

so with unit incidence ``y1[a] = 1`` and nothing entering from the right,
``S11`` is the reflection and ``S21`` the transmission coefficient.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from ._backend import kernels
from .errors import (
    CascadePole,
    NonInvertibleCell,
    ProfileSingular,
    SingularSystem,
    WindowMismatch,
)
from .recurrence import ScatterSolution, _Indexed
from .wavesplit import TransferSequence

T22_GUARD = 1e-300
POLE_TOL = 1e-12
PASS_THROUGH = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)

__all__ = [
    "CellScatterData", "CumulativeScatter", "ScatterSolution", "cell_smatrix",
    "cell_smatrices", "cascade", "cumulative_scatter", "extract_RT",
    "reconstruct_profile", "scatter", "direct_transfer_solve",
    "smatrix_from_solutions",
]


@dataclass(frozen=True, eq=False)
class CellScatterData:
    S: np.ndarray
    Fbar: np.ndarray


def cell_smatrix(T, fbar: complex = 0.0) -> CellScatterData:
    """Scattering form of one transfer matrix plus its forcing vector."""
    T = np.asarray(T, dtype=np.complex128)
    t11, t12, t21, t22 = T[0, 0], T[0, 1], T[1, 0], T[1, 1]
    if abs(t22) <= T22_GUARD:
        raise NonInvertibleCell("T22 vanishes")
    S = np.array([[-t21 / t22, 1.0 / t22],
                  [(t11 * t22 - t12 * t21) / t22, t12 / t22]], dtype=np.complex128)
    Fbar = np.array([-fbar / t22, -(t12 + t22) / t22 * fbar], dtype=np.complex128)
    return CellScatterData(S, Fbar)


def cell_smatrices(transfers: TransferSequence) -> np.ndarray:
    """Vectorized :func:`cell_smatrix` over a transfer sequence, ``(n, 2, 2)``."""
    T = transfers.T
    t11, t12, t21, t22 = T[:, 0, 0], T[:, 0, 1], T[:, 1, 0], T[:, 1, 1]
    bad = np.flatnonzero(np.abs(t22) <= T22_GUARD)
    if bad.size:
        raise NonInvertibleCell("T22 vanishes", cell=transfers.k_min + int(bad[0]))
    S = np.empty_like(T)
    S[:, 0, 0] = -t21 / t22
    S[:, 0, 1] = 1.0 / t22
    S[:, 1, 0] = (t11 * t22 - t12 * t21) / t22
    S[:, 1, 1] = t12 / t22
    return S


def cascade(acc, cell) -> np.ndarray:
    """Star product joining segment ``acc`` with the following ``cell``."""
    a = np.asarray(acc, dtype=np.complex128)
    c = np.asarray(cell, dtype=np.complex128)
    den = 1.0 - a[1, 1] * c[0, 0]
    if abs(den) < POLE_TOL:
        raise CascadePole("1 - acc22 * cell11 vanishes")
    return np.array([
        [a[0, 0] + a[0, 1] * c[0, 0] * a[1, 0] / den, a[0, 1] * c[0, 1] / den],
        [c[1, 0] * a[1, 0] / den, c[1, 1] + c[1, 0] * a[1, 1] * c[0, 1] / den],
    ], dtype=np.complex128)


@dataclass(frozen=True, eq=False)
class CumulativeScatter(_Indexed):
    """``S[k]`` linking the first cell ``k_min`` to cell ``k``.

    ``S[k_min]`` is the pass-through matrix and ``S[k_min + 1]`` equals the
    first cell matrix.
    """

    k_min: int
    S: np.ndarray

    def _primary(self):
        return self.S

    def matrix(self, k: int) -> np.ndarray:
        return self.S[self._pos(k)]

    @property
    def total(self) -> np.ndarray:
        return self.S[-1]


def cumulative_scatter(transfers: TransferSequence) -> CumulativeScatter:
    """Fold the cell matrices of ``transfers`` left to right."""
    if transfers.F.any():
        raise ValueError("forced chains are not supported by the cascade")
    cum, pole = kernels.cascade(np.ascontiguousarray(cell_smatrices(transfers)))
    if pole >= 0:
        raise CascadePole("1 - acc22 * cell11 vanishes", cell=transfers.k_min + pole)
    return CumulativeScatter(transfers.k_min - 1, cum)


def extract_RT(total) -> tuple[complex, complex]:
    total = np.asarray(total)
    return complex(total[0, 0]), complex(total[1, 0])


def reconstruct_profile(cums: CumulativeScatter, R: complex) -> ScatterSolution:
    """Split and total amplitudes on every cell from the partial matrices."""
    S = cums.S
    s12 = S[:, 0, 1]
    bad = np.flatnonzero(~(np.abs(s12) > np.finfo(float).tiny))
    if bad.size:
        raise ProfileSingular("cumulative S12 vanishes", cell=cums.k_min + int(bad[0]))
    y2 = (R - S[:, 0, 0]) / s12
    y1 = S[:, 1, 0] + S[:, 1, 1] * y2
    T = complex(S[-1, 1, 0])
    return ScatterSolution(complex(R), T, cums.k_min, y1 + y2, y1, y2)


def scatter(transfers: TransferSequence) -> ScatterSolution:
    """Unit incidence on cell ``k_min - 1`` of the chain, nothing from the right."""
    cums = cumulative_scatter(transfers)
    R, _ = extract_RT(cums.total)
    return reconstruct_profile(cums, R)


def direct_transfer_solve(transfers: TransferSequence,
                          from_right: bool = False) -> ScatterSolution:
    """Solve the propagator equations for all cells at once.

    Unknowns are the split amplitudes on cells ``k_min - 1 .. k_max``; the
    boundary data fix ``y1`` on the first cell and ``y2`` on the last one.
    Unit incidence enters on the left (``y1 = 1``) or, with ``from_right``,
    on the right (``y2 = 1``). Serves as an independent check of the cascade.
    """
    n = len(transfers)
    m = 2 * (n + 1)
    T, F = transfers.T, transfers.F
    # unknown order: y1[0], y2[0], y1[1], y2[1], ...; storage ab[1 + i - j, j]
    ab = np.zeros((4, m), dtype=np.complex128)
    rhs = np.zeros(m, dtype=np.complex128)

    def put(i, j, v):
        ab[1 + i - j, j] = v

    put(0, 0, 1.0)
    rhs[0] = 0.0 if from_right else 1.0
    for c in range(1, n + 1):
        t = T[c - 1]
        r1, r2 = 2 * c - 1, 2 * c
        # row r1: y1[c] - t11 y1[c-1] - t12 y2[c-1] = F1
        put(r1, 2 * c - 2, -t[0, 0])
        put(r1, 2 * c - 1, -t[0, 1])
        put(r1, 2 * c, 1.0)
        rhs[r1] = F[c - 1, 0]
        # row r2: y2[c] - t21 y1[c-1] - t22 y2[c-1] = F2
        put(r2, 2 * c - 2, -t[1, 0])
        put(r2, 2 * c - 1, -t[1, 1])
        put(r2, 2 * c + 1, 1.0)
        rhs[r2] = F[c - 1, 1]
    put(m - 1, m - 1, 1.0)
    rhs[m - 1] = 1.0 if from_right else 0.0
    try:
        x = solve_banded((2, 1), ab, rhs)
    except (LinAlgError, ValueError) as exc:
        raise SingularSystem(f"propagator system is singular: {exc}") from exc
    y1, y2 = x[0::2], x[1::2]
    if from_right:
        refl, trans = y1[-1], y2[0]
    else:
        refl, trans = y2[0], y1[-1]
    return ScatterSolution(complex(refl), complex(trans), transfers.k_min - 1,
                           y1 + y2, y1, y2)


def smatrix_from_solutions(left: ScatterSolution, right: ScatterSolution) -> np.ndarray:
    """Full-chain S assembled from a left-incident and a right-incident solve."""
    if left.k_min != right.k_min or len(left.y) != len(right.y):
        raise WindowMismatch("solutions cover different cells")
    return np.array([[left.R, right.T], [left.T, right.R]], dtype=np.complex128)
