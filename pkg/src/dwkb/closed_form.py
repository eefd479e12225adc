"""Closed-form discrete WKB solutions and the phase-drift sum.

Branch 1 of the Riccati-corrected solution reads

    y[k] ~ d[k]**(-1/4) exp(sum ln rho1[s-1] + sum (f1[s] - f1[s-1]) / (2 sqrt d[s]))

with ``d = f1**2 - 4 f0`` and both sums over ``s = k0+1 .. k``. Branch 2 flips
the sign of the second sum. The direct form drops the second sum entirely.
Throughout, ``sqrt d`` is taken as ``rho1 - rho2`` after branch assignment so
that it stays continuous along the chain; the quarter root uses the
unwrapped logarithm of that quantity.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import BranchCutCrossing, WindowMismatch
from .recurrence import (
    CoefficientSequence,
    RootPairSequence,
    _check_degenerate,
    _Indexed,
    assign_branches,
)
from .wavesplit import transfer_wkb_riccati

MAX_ARG_STEP = np.pi / 2

__all__ = [
    "ClosedFormVariant", "WkbClosedForm", "wkb_product", "wkb_expsum_riccati",
    "wkb_expsum_direct", "delta_p_sum", "delta_p_estimate",
]


class ClosedFormVariant(str, enum.Enum):
    PRODUCT = "product"
    RICCATI_SUM = "riccati-sum"
    DIRECT_SUM = "direct-sum"


@dataclass(frozen=True, eq=False)
class WkbClosedForm(_Indexed):
    """Values of a closed-form branch on ``[k0, k_end]``.

    ``prefactor`` holds the continued ``d**(-1/4)`` on the same cells
    (all ones for the product form, which carries no separate prefactor).
    """

    variant: ClosedFormVariant
    k_min: int
    values: np.ndarray
    prefactor: np.ndarray

    def _primary(self):
        return self.values

    @property
    def k0(self) -> int:
        return self.k_min

    def at(self, k: int) -> complex:
        return complex(self.values[self._pos(k)])


def _check_branch(branch):
    if branch not in (1, 2):
        raise ValueError("branch must be 1 or 2")


def _window(k0, k_end, *objs):
    lo = max(o.k_min for o in objs)
    hi = min(o.k_max for o in objs)
    if k_end < k0 or k0 < lo or k_end > hi:
        raise WindowMismatch(f"[{k0}, {k_end}] is not inside [{lo}, {hi}]")


def _continued_log(z: np.ndarray, k_min: int) -> np.ndarray:
    """Logarithm of ``z`` continued along the chain.

    Raises :class:`BranchCutCrossing` where the argument jumps by more than
    a quarter turn between neighbours, since continuation is then ambiguous.
    """
    ang = np.angle(z)
    step = np.diff(ang)
    step = (step + np.pi) % (2.0 * np.pi) - np.pi
    bad = np.flatnonzero(np.abs(step) > MAX_ARG_STEP)
    if bad.size:
        raise BranchCutCrossing("discriminant root jumps across a branch cut",
                                cell=k_min + int(bad[0]) + 1)
    arg = ang[0] + np.concatenate(([0.0], np.cumsum(step)))
    return np.log(np.abs(z)) + 1j * arg


def wkb_product(roots: RootPairSequence, branch: int, k0: int, k_end: int,
                y0: complex = 1.0) -> WkbClosedForm:
    """Running product of the diagonal Riccati-WKB factors from ``y0`` at ``k0``.

    Uses the same factor sequence as the Riccati propagator, so it coincides
    with propagating that transfer sequence from the same seed.
    """
    _check_branch(branch)
    _window(k0, k_end, roots)
    sub = roots.window(k0, k_end)
    values = np.empty(len(sub), dtype=np.complex128)
    values[0] = y0
    if len(sub) > 1:
        T = transfer_wkb_riccati(sub).T
        factors = T[:, 0, 0] if branch == 1 else T[:, 1, 1]
        acc = complex(y0)
        for i, f in enumerate(factors, start=1):
            acc *= f
            values[i] = acc
    return WkbClosedForm(ClosedFormVariant.PRODUCT, k0, values,
                         np.ones(len(sub), dtype=np.complex128))


def _expsum(seq, roots, branch, k0, k_end, y0, with_drift, variant):
    _check_branch(branch)
    _window(k0, k_end, roots, seq)
    sub = roots.window(k0, k_end)
    f1 = seq.f1[seq._slice(k0, k_end)]
    D = sub.sqrt_discriminant
    logD = _continued_log(D, k0)
    prefactor = np.exp(-0.5 * logD)
    rho = sub.branch(branch)
    expo = np.zeros(len(sub), dtype=np.complex128)
    expo[1:] = np.cumsum(np.log(rho[:-1]))
    if with_drift:
        drift = np.cumsum(np.diff(f1) / (2.0 * D[1:]))
        expo[1:] += drift if branch == 1 else -drift
    values = complex(y0) * np.exp(expo - 0.5 * (logD - logD[0]))
    return WkbClosedForm(variant, k0, values, prefactor)


def wkb_expsum_riccati(seq: CoefficientSequence, roots: RootPairSequence, branch: int,
                       k0: int, k_end: int, y0: complex = 1.0) -> WkbClosedForm:
    """Exponential-sum form of the Riccati-corrected WKB branch, equal to ``y0`` at ``k0``."""
    return _expsum(seq, roots, branch, k0, k_end, y0, True, ClosedFormVariant.RICCATI_SUM)


def wkb_expsum_direct(seq: CoefficientSequence, roots: RootPairSequence, branch: int,
                      k0: int, k_end: int, y0: complex = 1.0) -> WkbClosedForm:
    """Exponential-sum form without the drift sum, equal to ``y0`` at ``k0``."""
    return _expsum(seq, roots, branch, k0, k_end, y0, False, ClosedFormVariant.DIRECT_SUM)


def delta_p_sum(seq: CoefficientSequence, k0: int, k_end: int) -> complex:
    """``sum_{s=k0+1}^{k_end} (f1[s] - f1[s-1]) / (2 sqrt d[s])``.

    The square root follows branch 1 minus branch 2 of the assigned roots.
    """
    _window(k0, k_end, seq)
    sub = seq.window(k0, k_end)
    _check_degenerate(sub)
    D = assign_branches(sub).sqrt_discriminant
    return complex(np.sum(np.diff(sub.f1) / (2.0 * D[1:])))


def delta_p_estimate(phi_in: float, phi_out: float) -> complex:
    """Continuum limit of :func:`delta_p_sum` for a smooth phase transition."""
    for phi in (phi_in, phi_out):
        if not 0.0 < phi < np.pi:
            raise ValueError("phases must lie in (0, pi)")
    return -0.5j * (phi_out - phi_in)
