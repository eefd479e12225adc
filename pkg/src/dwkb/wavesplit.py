"""Wave splitting into two first-order sequences and the transfer matrices.

A solution is split as ``y[k] = y1[k] + y2[k]`` with the extra condition
``y[k+1] = g1[k] y1[k] + g2[k] y2[k]`` for arbitrary gauge sequences
``g1 != g2``. The split amplitudes then obey

    (y1[k], y2[k]) = T[k] (y1[k-1], y2[k-1]) + F[k].

Choosing the characteristic roots as gauge gives the exact matrix; dropping
its off-diagonal part gives the discrete WKB propagators.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .recurrence import (
    DEGENERACY_TOL,
    CoefficientSequence,
    RootPairSequence,
    SolutionProfile,
    _carray,
    _Indexed,
)
from .errors import GaugeCollision, WindowMismatch, WindowTooSmall


class Variant(str, enum.Enum):
    EXACT = "exact"
    WKB_RICCATI = "wkb-riccati"
    WKB_DIRECT = "wkb-direct"
    GENERAL_GAUGE = "general-gauge"

    @property
    def diagonal(self) -> bool:
        return self in (Variant.WKB_RICCATI, Variant.WKB_DIRECT)


@dataclass(frozen=True, eq=False)
class GaugeSequences(_Indexed):
    """Splitting sequences ``g1``, ``g2`` on ``[k_min, k_max]``."""

    k_min: int
    g1: np.ndarray
    g2: np.ndarray

    def __post_init__(self):
        g1 = _carray(self.g1, "g1")
        g2 = _carray(self.g2, "g2")
        if g1.shape != g2.shape or g1.size == 0:
            raise WindowMismatch("g1 and g2 must be non-empty and equally long")
        scale = np.maximum(1.0, np.abs(g1) + np.abs(g2))
        bad = np.flatnonzero(np.abs(g1 - g2) ** 2 < DEGENERACY_TOL * scale ** 2)
        if bad.size:
            raise GaugeCollision("g1 == g2", cell=self.k_min + int(bad[0]))
        object.__setattr__(self, "k_min", int(self.k_min))
        object.__setattr__(self, "g1", g1)
        object.__setattr__(self, "g2", g2)

    def _primary(self):
        return self.g1

    def branch(self, j: int) -> np.ndarray:
        if j == 1:
            return self.g1
        if j == 2:
            return self.g2
        raise ValueError("branch must be 1 or 2")

    @classmethod
    def from_roots(cls, roots: RootPairSequence) -> "GaugeSequences":
        return cls(roots.k_min, roots.rho1, roots.rho2)


@dataclass(frozen=True)
class SplitState:
    y1: complex
    y2: complex

    @property
    def y(self) -> complex:
        return self.y1 + self.y2


@dataclass(frozen=True, eq=False)
class TransferSequence(_Indexed):
    """``T[k]`` (shape ``(n, 2, 2)``) and ``F[k]`` (shape ``(n, 2)``) for
    ``k`` in ``[k_min, k_max]``; ``T[k]`` maps cell ``k - 1`` to cell ``k``."""

    variant: Variant
    k_min: int
    T: np.ndarray
    F: np.ndarray

    def __post_init__(self):
        T = np.array(self.T, dtype=np.complex128, copy=True)
        F = np.array(self.F, dtype=np.complex128, copy=True)
        if T.ndim != 3 or T.shape[1:] != (2, 2) or T.shape[0] == 0:
            raise WindowMismatch("T must have shape (n, 2, 2) with n > 0")
        if F.shape != (T.shape[0], 2):
            raise WindowMismatch("F must have shape (n, 2)")
        variant = Variant(self.variant)
        if variant.diagonal and (np.any(T[:, 0, 1]) or np.any(T[:, 1, 0])):
            raise ValueError(f"{variant.value} transfer matrices must be diagonal")
        T.flags.writeable = False
        F.flags.writeable = False
        object.__setattr__(self, "variant", variant)
        object.__setattr__(self, "k_min", int(self.k_min))
        object.__setattr__(self, "T", T)
        object.__setattr__(self, "F", F)

    def _primary(self):
        return self.T

    def matrix(self, k: int) -> np.ndarray:
        return self.T[self._pos(k)]

    def window(self, lo: int, hi: int) -> "TransferSequence":
        s = self._slice(lo, hi)
        return TransferSequence(self.variant, lo, self.T[s], self.F[s])


@dataclass(frozen=True, eq=False)
class SplitProfile(_Indexed):
    """Propagated split amplitudes on ``[k_min, k_max]``."""

    k_min: int
    y1: np.ndarray
    y2: np.ndarray

    def _primary(self):
        return self.y1

    @property
    def y(self) -> np.ndarray:
        return self.y1 + self.y2

    @property
    def profile(self) -> SolutionProfile:
        return SolutionProfile(self.k_min, self.y)

    def state(self, k: int) -> SplitState:
        i = self._pos(k)
        return SplitState(complex(self.y1[i]), complex(self.y2[i]))


def _stack(t11, t12, t21, t22):
    T = np.empty((len(t11), 2, 2), dtype=np.complex128)
    T[:, 0, 0], T[:, 0, 1], T[:, 1, 0], T[:, 1, 1] = t11, t12, t21, t22
    return T


def build_transfer_general(seq: CoefficientSequence,
                           g: GaugeSequences) -> TransferSequence:
    """Transfer matrices for an arbitrary gauge.

    ``T[k]`` uses the coefficients at ``k - 1`` and the gauge at ``k - 1``
    and ``k``; it is produced for every ``k`` where those exist.
    """
    lo = max(seq.k_min, g.k_min) + 1
    hi = min(seq.k_max + 1, g.k_max)
    if lo > hi:
        raise WindowTooSmall("gauge and coefficient windows do not overlap")
    prev = slice(lo - 1 - seq.k_min, hi - seq.k_min)
    f0, f1, fk = seq.f0[prev], seq.f1[prev], seq.forcing[prev]
    gp = slice(lo - 1 - g.k_min, hi - g.k_min)
    gc = slice(lo - g.k_min, hi - g.k_min + 1)
    g1p, g2p = g.g1[gp], g.g2[gp]
    g1, g2 = g.g1[gc], g.g2[gc]
    den = g1 - g2
    T = _stack(-(f0 + g1p * (g2 + f1)) / den,
               -(f0 + g2p * (g2 + f1)) / den,
               (f0 + g1p * (g1 + f1)) / den,
               (f0 + g2p * (g1 + f1)) / den)
    fbar = fk / den
    F = np.stack([-fbar, fbar], axis=1)
    return TransferSequence(Variant.GENERAL_GAUGE, lo, T, F)


def split_from_solution(y_k: complex, y_k1: complex, g: GaugeSequences,
                        k: int) -> SplitState:
    """Invert ``y = y1 + y2``, ``y_next = g1 y1 + g2 y2`` at index ``k``."""
    i = g._pos(k)
    g1, g2 = complex(g.g1[i]), complex(g.g2[i])
    den = g1 - g2
    if abs(den) ** 2 < DEGENERACY_TOL * max(1.0, abs(g1) + abs(g2)) ** 2:
        raise GaugeCollision("g1 == g2", cell=k)
    return SplitState((y_k1 - g2 * y_k) / den, (g1 * y_k - y_k1) / den)


def _root_windows(roots: RootPairSequence):
    if len(roots) < 2:
        raise WindowTooSmall("transfer matrices need roots on at least two cells")
    r1, r2 = roots.rho1, roots.rho2
    return r1[:-1], r2[:-1], r1[1:], r2[1:], r1[1:] - r2[1:]


def transfer_exact(roots: RootPairSequence) -> TransferSequence:
    """Exact transfer matrices in the root gauge, for ``k`` in
    ``[roots.k_min + 1, roots.k_max]``."""
    p1, p2, c1, c2, den = _root_windows(roots)
    T = _stack(p1 * (p1 - c2) / den,
               p2 * (p2 - c2) / den,
               p1 * (c1 - p1) / den,
               p2 * (c1 - p2) / den)
    return TransferSequence(Variant.EXACT, roots.k_min + 1, T,
                            np.zeros((len(T), 2), dtype=np.complex128))


def _diagonal(variant, k_min, d1, d2):
    z = np.zeros_like(d1)
    return TransferSequence(variant, k_min, _stack(d1, z, z, d2),
                            np.zeros((len(d1), 2), dtype=np.complex128))


def transfer_wkb_riccati(roots: RootPairSequence) -> TransferSequence:
    """Diagonal of the exact matrix; the Riccati-based WKB propagator."""
    p1, p2, c1, c2, den = _root_windows(roots)
    return _diagonal(Variant.WKB_RICCATI, roots.k_min + 1,
                     p1 * (1.0 - (c1 - p1) / den),
                     p2 * (1.0 + (c2 - p2) / den))


def transfer_wkb_direct(roots: RootPairSequence) -> TransferSequence:
    """WKB propagator whose corrections use only half the discriminant root.

    Same shape as :func:`transfer_wkb_riccati` with the root differences
    replaced by differences of ``+-sqrt(f1**2 - 4 f0) / 2``.
    """
    p1, p2, _, _, den = _root_windows(roots)
    half = 0.5 * roots.sqrt_discriminant
    dh = half[1:] - half[:-1]
    return _diagonal(Variant.WKB_DIRECT, roots.k_min + 1,
                     p1 * (1.0 - dh / den),
                     p2 * (1.0 - dh / den))


def riccati_approx_roots(roots: RootPairSequence, branch: int | None = None) -> GaugeSequences:
    """First-order solution of the Riccati equation built from the roots.

    ``g[k-1] = rho[k-1] (1 -+ (rho[k] - rho[k-1]) / (rho1[k] - rho2[k]))``
    with ``-`` on branch 1 and ``+`` on branch 2, on ``[k_min, k_max - 1]``.
    When ``branch`` is given only that branch is corrected and the other
    keeps the plain roots.
    """
    p1, p2, c1, c2, den = _root_windows(roots)
    g1 = p1 * (1.0 - (c1 - p1) / den)
    g2 = p2 * (1.0 + (c2 - p2) / den)
    if branch == 1:
        g2 = p2
    elif branch == 2:
        g1 = p1
    elif branch is not None:
        raise ValueError("branch must be 1, 2 or None")
    return GaugeSequences(roots.k_min, g1, g2)


def _restrict(lo, hi, k_range):
    if k_range is not None:
        lo, hi = max(lo, k_range[0]), min(hi, k_range[1])
    if lo > hi:
        raise WindowTooSmall("empty residual window")
    return lo, hi


def riccati_residual(g: GaugeSequences, seq: CoefficientSequence, branch: int,
                     k_range: tuple[int, int] | None = None) -> float:
    """``max_k |f0[k] + g[k] (g[k+1] + f1[k])|`` for the chosen branch.

    ``k_range`` optionally restricts ``k`` to an inclusive sub-window.
    """
    gb = g.branch(branch)
    lo, hi = _restrict(max(g.k_min, seq.k_min), min(g.k_max - 1, seq.k_max), k_range)
    gk = gb[lo - g.k_min: hi - g.k_min + 1]
    gn = gb[lo - g.k_min + 1: hi - g.k_min + 2]
    s = seq._slice(lo, hi)
    return float(np.max(np.abs(seq.f0[s] + gk * (gn + seq.f1[s]))))


def riccati_quadratic_residual(g: GaugeSequences, roots: RootPairSequence,
                               seq: CoefficientSequence, branch: int,
                               k_range: tuple[int, int] | None = None) -> float:
    """Defect of the iterated quadratic
    ``g[m]**2 + f1[m] g[m] + f0[m] + rho[m+1] (rho[m+2] - rho[m+1])``."""
    gb = g.branch(branch)
    rb = roots.branch(branch)
    lo = max(g.k_min, seq.k_min, roots.k_min - 1)
    hi = min(g.k_max, seq.k_max, roots.k_max - 2)
    lo, hi = _restrict(lo, hi, k_range)
    gm = gb[lo - g.k_min: hi - g.k_min + 1]
    s = seq._slice(lo, hi)
    r1 = rb[lo + 1 - roots.k_min: hi + 2 - roots.k_min]
    r2 = rb[lo + 2 - roots.k_min: hi + 3 - roots.k_min]
    return float(np.max(np.abs(gm * gm + seq.f1[s] * gm + seq.f0[s] + r1 * (r2 - r1))))


def propagate(transfers: TransferSequence, initial: SplitState,
              k0: int | None = None, k_end: int | None = None) -> SplitProfile:
    """March ``initial`` at ``k0`` through ``T[k0+1] .. T[k_end]``."""
    if k0 is None:
        k0 = transfers.k_min - 1
    if k_end is None:
        k_end = transfers.k_max
    if k0 + 1 < transfers.k_min or k_end > transfers.k_max or k_end < k0:
        raise WindowMismatch(
            f"transfers [{transfers.k_min}, {transfers.k_max}] do not cover "
            f"[{k0 + 1}, {k_end}]")
    s = slice(k0 + 1 - transfers.k_min, k_end - transfers.k_min + 1)
    out = kernels.propagate(np.ascontiguousarray(transfers.T[s]),
                            np.ascontiguousarray(transfers.F[s]),
                            np.array([initial.y1, initial.y2], dtype=np.complex128))
    return SplitProfile(k0, out[:, 0].copy(), out[:, 1].copy())
