"""Second-order recurrences, characteristic roots and verification tools.

Indexing convention (used by every module)::

    y[k+2] + f1[k] y[k+1] + f0[k] y[k] + forcing[k] = 0

so a coefficient window ``[k_min, k_max]`` determines a solution window
``[k_min, k_max + 2]``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from ._backend import kernels
from .errors import (
    DegenerateRoots,
    LeadMismatch,
    SingularSystem,
    WindowMismatch,
    WindowTooSmall,
)

# |discriminant| below DEGENERACY_TOL * max(1, |f1|^2) counts as a double root
DEGENERACY_TOL = 1e-14
VIETA_TOL = 1e-12
LEAD_TOL = 1e-9


def _carray(values, name):
    arr = np.array(values, dtype=np.complex128, copy=True).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    arr.flags.writeable = False
    return arr


class _Indexed:
    """Shared index arithmetic for arrays that start at ``k_min``."""

    k_min: int

    def __len__(self):
        return len(self._primary())

    @property
    def k_max(self) -> int:
        return self.k_min + len(self) - 1

    @property
    def ks(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)

    def _pos(self, k: int) -> int:
        if not self.k_min <= k <= self.k_max:
            raise WindowMismatch(f"index {k} outside [{self.k_min}, {self.k_max}]")
        return k - self.k_min

    def _slice(self, lo: int, hi: int) -> slice:
        if lo > hi or lo < self.k_min or hi > self.k_max:
            raise WindowMismatch(
                f"window [{lo}, {hi}] not inside [{self.k_min}, {self.k_max}]")
        return slice(lo - self.k_min, hi - self.k_min + 1)


@dataclass(frozen=True, eq=False)
class CoefficientSequence(_Indexed):
    """Recurrence coefficients ``f0``, ``f1`` and optional ``forcing``."""

    k_min: int
    f0: np.ndarray
    f1: np.ndarray
    forcing: np.ndarray | None = None

    def __post_init__(self):
        f0 = _carray(self.f0, "f0")
        f1 = _carray(self.f1, "f1")
        if f0.shape != f1.shape or f0.size == 0:
            raise WindowMismatch("f0 and f1 must be non-empty and equally long")
        forcing = (np.zeros_like(f0) if self.forcing is None
                   else _carray(self.forcing, "forcing"))
        if forcing.shape != f0.shape:
            raise WindowMismatch("forcing length differs from f0")
        forcing.flags.writeable = False
        zero = np.flatnonzero(f0 == 0)
        if zero.size:
            raise ValueError(f"f0 vanishes at k = {self.k_min + int(zero[0])}")
        object.__setattr__(self, "k_min", int(self.k_min))
        object.__setattr__(self, "f0", f0)
        object.__setattr__(self, "f1", f1)
        object.__setattr__(self, "forcing", forcing)

    def _primary(self):
        return self.f0

    @property
    def homogeneous(self) -> bool:
        return not np.any(self.forcing)

    @property
    def discriminant(self) -> np.ndarray:
        return self.f1 * self.f1 - 4.0 * self.f0

    def at(self, k: int) -> tuple[complex, complex, complex]:
        """``(f0, f1, forcing)`` at index ``k``."""
        i = self._pos(k)
        return complex(self.f0[i]), complex(self.f1[i]), complex(self.forcing[i])

    def window(self, lo: int, hi: int) -> "CoefficientSequence":
        s = self._slice(lo, hi)
        return CoefficientSequence(lo, self.f0[s], self.f1[s], self.forcing[s])

    @classmethod
    def constant(cls, f1: complex, f0: complex, k_min: int, k_max: int):
        n = k_max - k_min + 1
        return cls(k_min, np.full(n, f0, dtype=complex), np.full(n, f1, dtype=complex))


@dataclass(frozen=True, eq=False)
class RootPairSequence(_Indexed):
    """Branch-assigned characteristic roots.

    ``rho1 - rho2`` is the square root of the discriminant on a branch that
    is continuous in ``k``; the WKB formulas use it wherever the
    discriminant's square root appears.
    """

    k_min: int
    rho1: np.ndarray
    rho2: np.ndarray

    def __post_init__(self):
        r1 = _carray(self.rho1, "rho1")
        r2 = _carray(self.rho2, "rho2")
        if r1.shape != r2.shape or r1.size == 0:
            raise WindowMismatch("rho1 and rho2 must be non-empty and equally long")
        scale = np.maximum(1.0, np.abs(r1) + np.abs(r2))
        bad = np.flatnonzero(np.abs(r1 - r2) ** 2 < DEGENERACY_TOL * scale ** 2)
        if bad.size:
            raise DegenerateRoots("coincident roots", cell=self.k_min + int(bad[0]))
        object.__setattr__(self, "k_min", int(self.k_min))
        object.__setattr__(self, "rho1", r1)
        object.__setattr__(self, "rho2", r2)

    def _primary(self):
        return self.rho1

    @property
    def sqrt_discriminant(self) -> np.ndarray:
        return self.rho1 - self.rho2

    @property
    def discriminant(self) -> np.ndarray:
        d = self.rho1 - self.rho2
        return d * d

    def branch(self, j: int) -> np.ndarray:
        if j == 1:
            return self.rho1
        if j == 2:
            return self.rho2
        raise ValueError("branch must be 1 or 2")

    def window(self, lo: int, hi: int) -> "RootPairSequence":
        s = self._slice(lo, hi)
        return RootPairSequence(lo, self.rho1[s], self.rho2[s])


@dataclass(frozen=True, eq=False)
class SolutionProfile(_Indexed):
    """Values ``y[k]`` on a contiguous window starting at ``k_min``."""

    k_min: int
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "k_min", int(self.k_min))
        object.__setattr__(self, "y", _carray(self.y, "y"))

    def _primary(self):
        return self.y

    def at(self, k: int) -> complex:
        return complex(self.y[self._pos(k)])

    def window(self, lo: int, hi: int) -> "SolutionProfile":
        return SolutionProfile(lo, self.y[self._slice(lo, hi)])


@dataclass(frozen=True)
class ScatterBoundary:
    """Homogeneous leads with phase advance ``phi_in`` (left) and ``phi_out``."""

    phi_in: float
    phi_out: float
    incident_amplitude: complex = 1.0

    def __post_init__(self):
        for name in ("phi_in", "phi_out"):
            phi = getattr(self, name)
            if not 0.0 < phi < math.pi:
                raise ValueError(f"{name} = {phi} is not a propagating lead phase")
        if self.incident_amplitude == 0:
            raise ValueError("incident amplitude must be nonzero")


@dataclass(frozen=True, eq=False)
class ScatterSolution:
    """Reflection, transmission and the field profile on cells ``k_min..``.

    ``y1``/``y2`` hold the split (incident-branch / reflected-branch)
    amplitudes when the producing method defines them.
    """

    R: complex
    T: complex
    k_min: int
    y: np.ndarray
    y1: np.ndarray | None = None
    y2: np.ndarray | None = None

    @property
    def k_max(self) -> int:
        return self.k_min + len(self.y) - 1

    @property
    def profile(self) -> SolutionProfile:
        return SolutionProfile(self.k_min, self.y)

    def at(self, k: int) -> complex:
        return self.profile.at(k)


def _stable_roots(f1, f0):
    """Both quadratic roots, avoiding cancellation. Vectorized."""
    f1 = np.asarray(f1, dtype=np.complex128)
    f0 = np.asarray(f0, dtype=np.complex128)
    s = np.sqrt(f1 * f1 - 4.0 * f0)
    # pick the sign that adds magnitudes in f1 + s
    s = np.where((np.conj(f1) * s).real >= 0.0, s, -s)
    q = -0.5 * (f1 + s)
    with np.errstate(divide="ignore", invalid="ignore"):
        other = f0 / q
    return q, other


def _check_degenerate(seq: CoefficientSequence, lo: int = 0):
    d = seq.discriminant
    tol = DEGENERACY_TOL * np.maximum(1.0, np.abs(seq.f1) ** 2)
    bad = np.flatnonzero(np.abs(d) < tol)
    if bad.size:
        raise DegenerateRoots("double characteristic root (band edge)",
                              cell=seq.k_min + int(bad[0]))


def characteristic_roots(seq: CoefficientSequence, k: int) -> tuple[complex, complex]:
    """The two roots of ``rho**2 + f1[k] rho + f0[k] = 0``, unordered."""
    f0, f1, _ = seq.at(k)
    if abs(f1 * f1 - 4 * f0) < DEGENERACY_TOL * max(1.0, abs(f1) ** 2):
        raise DegenerateRoots("double characteristic root (band edge)", cell=k)
    a, b = _stable_roots(f1, f0)
    return complex(a), complex(b)


def assign_branches(seq: CoefficientSequence) -> RootPairSequence:
    """Characteristic roots over the whole window, on continuous branches.

    Branch 1 starts on the root with non-negative imaginary part and every
    later cell keeps the pairing closest to the previous cell.
    """
    _check_degenerate(seq)
    a, b = _stable_roots(seq.f1, seq.f0)
    r1, r2 = kernels.pair_roots(np.ascontiguousarray(a), np.ascontiguousarray(b))
    return RootPairSequence(seq.k_min, r1, r2)


def iterate_recurrence(seq: CoefficientSequence, y_first: complex,
                       y_second: complex) -> SolutionProfile:
    """March the recurrence forward from ``y[k_min]``, ``y[k_min + 1]``."""
    y = kernels.iterate(np.ascontiguousarray(seq.f1), np.ascontiguousarray(seq.f0),
                        np.ascontiguousarray(seq.forcing), complex(y_first),
                        complex(y_second))
    return SolutionProfile(seq.k_min, y)


def recurrence_residual(seq: CoefficientSequence, profile: SolutionProfile) -> float:
    """Max recurrence defect over the window, relative to ``max |y|``."""
    if profile.k_min > seq.k_min or profile.k_max < seq.k_max + 2:
        raise WindowMismatch(
            f"profile [{profile.k_min}, {profile.k_max}] does not cover "
            f"[{seq.k_min}, {seq.k_max + 2}]")
    y = profile.y[profile._slice(seq.k_min, seq.k_max + 2)]
    res = y[2:] + seq.f1 * y[1:-1] + seq.f0 * y[:-2] + seq.forcing
    num = float(np.max(np.abs(res)))
    scale = float(np.max(np.abs(y)))
    if scale == 0.0:
        return 0.0 if num == 0.0 else math.inf
    return num / scale


def _is_lead(f0, f1, phi):
    return abs(f1 + 2.0 * math.cos(phi)) + abs(f0 - 1.0) < LEAD_TOL


def direct_scatter_solve(seq: CoefficientSequence, boundary: ScatterBoundary,
                         direction: str = "left") -> ScatterSolution:
    """Reflection and transmission from one banded boundary-value solve.

    Independent of the wave-splitting machinery. The solution window is
    ``[k_min, k_max + 2]``. With ``a = k_min + 1`` (first cell) and
    ``b = k_max + 1`` (last cell) the field obeys::

        y[k] = A (exp(i phi_in (k - a)) + R exp(-i phi_in (k - a)))   near a
        y[k] = A T exp(i phi_out (k - b))                             near b

    where ``A`` is the incident amplitude. With ``direction="right"`` the
    wave enters from the right lead instead::

        y[k] = A T exp(-i phi_in (k - a))                             near a
        y[k] = A (exp(-i phi_out (k - b)) + R exp(i phi_out (k - b))) near b

    The first and last coefficients
    of ``seq`` must be those of the homogeneous leads
    (``f1 = -2 cos phi``, ``f0 = 1``).
    """
    n = len(seq)
    if n < 2:
        raise WindowTooSmall("need at least two recurrence steps")
    f0_first, f1_first, _ = seq.at(seq.k_min)
    f0_last, f1_last, _ = seq.at(seq.k_max)
    if not _is_lead(f0_first, f1_first, boundary.phi_in):
        raise LeadMismatch(f"first coefficients are not a lead with phase {boundary.phi_in}")
    if not _is_lead(f0_last, f1_last, boundary.phi_out):
        raise LeadMismatch(f"last coefficients are not a lead with phase {boundary.phi_out}")

    if direction not in ("left", "right"):
        raise ValueError("direction must be 'left' or 'right'")
    from_right = direction == "right"
    amp = complex(boundary.incident_amplitude)
    e_in = cmath.exp(1j * boundary.phi_in)
    e_out = cmath.exp(1j * boundary.phi_out)
    m = n + 2
    # banded storage for solve_banded((1, 1), ...): ab[1 + i - j, j] = A[i, j]
    ab = np.zeros((3, m), dtype=np.complex128)
    rhs = np.zeros(m, dtype=np.complex128)
    # left lead: y[a-1] - e_in y[a] = A (1/e_in - e_in), or 0 when nothing enters
    ab[1, 0] = 1.0
    ab[0, 1] = -e_in
    rhs[0] = 0.0 if from_right else amp * (1.0 / e_in - e_in)
    # recurrence rows: row r holds the step centred on column r
    rows = np.arange(1, n + 1)
    ab[2, rows - 1] = seq.f0
    ab[1, rows] = seq.f1
    ab[0, rows + 1] = 1.0
    rhs[1:n + 1] = -seq.forcing
    # right lead: y[b+1] - e_out y[b] = 0, or A (1/e_out - e_out) with incidence
    ab[2, m - 2] = -e_out
    ab[1, m - 1] = 1.0
    rhs[m - 1] = amp * (1.0 / e_out - e_out) if from_right else 0.0
    try:
        y = solve_banded((1, 1), ab, rhs)
    except (LinAlgError, ValueError) as exc:
        raise SingularSystem(f"boundary-value system is singular: {exc}") from exc
    if not np.all(np.isfinite(y)):
        raise SingularSystem("boundary-value solve produced non-finite values")
    if from_right:
        R = (y[m - 2] - amp) / amp
        T = y[1] / amp
    else:
        R = (y[1] - amp) / amp
        T = y[m - 2] / amp
    return ScatterSolution(complex(R), complex(T), seq.k_min, y)


def flux_series(profile: SolutionProfile,
                weight: Callable[[int], float] | Sequence[float] | np.ndarray) -> np.ndarray:
    """``P[k] = w[k+1] * Im(conj(y[k]) y[k+1])`` for ``k`` in ``[k_min, k_max - 1]``.

    ``weight`` is either a callable of the integer index or an array aligned
    with ``profile`` (entry ``i`` belongs to ``k_min + i``). For the
    cavity-chain recurrence with the normalized coupling as weight the series
    is constant on exact solutions. Entry ``i`` of the result is ``P[k_min + i]``.
    """
    y = profile.y
    if len(y) < 2:
        raise WindowMismatch("flux needs at least two samples")
    if callable(weight):
        w = np.array([weight(k) for k in range(profile.k_min + 1, profile.k_max + 1)],
                     dtype=float)
    else:
        w = np.asarray(weight, dtype=float)
        if w.shape != y.shape:
            raise WindowMismatch("weight array must align with the profile")
        w = w[1:]
    return w * np.imag(np.conj(y[:-1]) * y[1:])
