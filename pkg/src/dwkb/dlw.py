"""Benchmark chains: phase profiles, their recurrences, and DLW geometry.

The cavity chain obeys

    Z[k] y[k] = a_m[k] y[k-1] + a_p[k] y[k+1]

with coupling coefficients set by the iris radii. For identical cells and
small irises the normalized coupling ``ubar[k] = (1 - cos phi_I) / (1 - cos phi[k])``
fixes the recurrence entirely, so a phase profile is enough to build it.

Physical index ``k`` (cell number) maps to canonical recurrence index
``k - 1``: the canonical step at ``j`` produces ``y[j+2]`` from ``y[j+1]`` and
``y[j]`` and carries the coefficients of the physical step centred on
``k = j + 1``.
"""
from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import BadGeometry, BadWindow, FitRangeWarning
from .recurrence import CoefficientSequence

SPEED_OF_LIGHT_CM = 29979245800.0
DEFAULT_FREQUENCY = 2.856e9
DEFAULT_D_STAR = 3.0989
DEFAULT_THICKNESS = 0.4
FIT_RANGE = (0.0, 2.0)
ALPHA_CHECK = 0.78738

__all__ = [
    "PhaseProfile", "linear_ramp_profile", "u_bar", "coeffs_from_phase",
    "p_polynomials", "ModelConstants", "model_constants", "WaveguideGeometry",
    "coupling_coeffs", "coeffs_from_geometry", "geometry_from_phase",
]


def _check_phase(phi, what="phase"):
    if not 0.0 < phi < math.pi:
        raise BadWindow(f"{what} {phi!r} is outside the passband (0, pi)")


@dataclass(frozen=True, eq=False)
class PhaseProfile:
    """Per-cell phase advance on cells ``1 .. N``.

    Outside that window the profile continues with its end values, so the
    chain sits between two homogeneous leads.
    """

    phi: np.ndarray
    N: int
    N_h: int = 0

    def __post_init__(self):
        phi = np.array(self.phi, dtype=float)
        if phi.ndim != 1 or len(phi) != self.N or self.N < 1:
            raise BadWindow("phi must hold one value per cell 1 .. N")
        if not np.all((phi > 0.0) & (phi < math.pi)):
            bad = int(np.flatnonzero(~((phi > 0.0) & (phi < math.pi)))[0]) + 1
            raise BadWindow(f"phase at cell {bad} is outside the passband (0, pi)")
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)

    @property
    def phi_I(self) -> float:
        return float(self.phi[0])

    @property
    def phi_II(self) -> float:
        return float(self.phi[-1])

    def phase(self, k) -> np.ndarray | float:
        """Phase at cell ``k`` (scalar or array), clipped to the end values."""
        idx = np.clip(np.asarray(k), 1, self.N) - 1
        out = self.phi[idx]
        return float(out) if np.ndim(out) == 0 else out


def linear_ramp_profile(phi_I: float, phi_II: float, N_h: int, N: int) -> PhaseProfile:
    """Plateau, linear transition over ``N - 2 N_h`` cells, plateau."""
    if not (isinstance(N, (int, np.integer)) and isinstance(N_h, (int, np.integer))):
        raise BadWindow("N and N_h must be integers")
    if not N > 2 * N_h >= 0:
        raise BadWindow(f"need N > 2 N_h >= 0, got N={N}, N_h={N_h}")
    _check_phase(phi_I, "phi_I")
    _check_phase(phi_II, "phi_II")
    k = np.arange(1, N + 1)
    ramp = phi_I + (phi_II - phi_I) / (N - 2 * N_h) * (k - N_h)
    phi = np.where(k <= N_h, phi_I, np.where(k <= N - N_h, ramp, phi_II))
    return PhaseProfile(phi, int(N), int(N_h))


def u_bar(profile: PhaseProfile, k):
    """Normalized coupling at cell ``k`` relative to the first plateau."""
    return (1.0 - math.cos(profile.phi_I)) / (1.0 - np.cos(profile.phase(k)))


def coeffs_from_phase(profile: PhaseProfile, k_lo: int = 0, k_hi: int | None = None,
                      form: str = "coupling") -> CoefficientSequence:
    """Recurrence coefficients of a phase profile on canonical ``[k_lo, k_hi]``.

    ``form="coupling"`` evaluates the ratios of normalized couplings,
    ``form="cosine"`` the equivalent expression in cosines of neighbouring
    phases. The default window ``[0, N]`` covers physical steps ``1 .. N+1``.
    """
    if k_hi is None:
        k_hi = profile.N
    if k_hi < k_lo:
        raise BadWindow("empty coefficient window")
    k = np.arange(k_lo, k_hi + 1) + 1
    if form == "coupling":
        u0, u1 = u_bar(profile, k), u_bar(profile, k + 1)
        c_I = math.cos(profile.phi_I)
        f1 = (2.0 * (1.0 - c_I) - (u0 + u1)) / u1
        f0 = u0 / u1
    elif form == "cosine":
        c0, c1 = np.cos(profile.phase(k)), np.cos(profile.phase(k + 1))
        q = (c1 - c0) / (1.0 - c0)
        f1 = -2.0 * c1 + q
        f0 = 1.0 - q
    else:
        raise ValueError(f"unknown coefficient form {form!r}")
    return CoefficientSequence(k_lo, f0, f1)


def p_polynomials(a: float) -> tuple[float, float]:
    """Fitted hole corrections ``(p_s, p_c)`` for iris radius ``a`` in cm.

    The fit was made for 0.4 cm disks and 3.0989 cm cells; radii outside
    ``(0, 2]`` cm trigger a :class:`FitRangeWarning`.
    """
    if not FIT_RANGE[0] < a <= FIT_RANGE[1]:
        warnings.warn(f"iris radius {a} cm is outside the fitted range (0, 2] cm",
                      FitRangeWarning, stacklevel=2)
    p_s = 0.0142 * a * a - 0.1329 * a + 0.9133
    p_c = -0.0928 * a * a + 0.4491 * a - 0.0444
    return p_s, p_c


def _j_series(n: int, x: float, terms: int = 40) -> float:
    # power series of the Bessel function of integer order n
    return sum((-1) ** m / (math.factorial(m) * math.factorial(m + n)) * (x / 2) ** (2 * m + n)
               for m in range(terms))


def _bisect_zero(lo: float = 2.0, hi: float = 3.0, tol: float = 1e-15) -> float:
    flo = _j_series(0, lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = _j_series(0, mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ModelConstants:
    """First zero of ``J0`` and the coupling prefactor ``2 / (3 pi J1(lambda01)**2)``."""

    lambda01: float
    alpha: float


@functools.lru_cache(maxsize=None)
def model_constants() -> ModelConstants:
    """Constants from scipy, cross-checked against series and bisection."""
    lam = float(special.jn_zeros(0, 1)[0])
    j1 = float(special.j1(lam))
    lam_ref = _bisect_zero()
    j1_ref = _j_series(1, lam_ref)
    if abs(lam - lam_ref) > 1e-12 or abs(j1 - j1_ref) > 1e-12:
        raise RuntimeError("Bessel evaluations disagree; check the scipy installation")
    alpha = 2.0 / (3.0 * math.pi * j1 * j1)
    if abs(alpha - ALPHA_CHECK) > 1e-4:
        raise RuntimeError(f"coupling prefactor {alpha} is off its expected value")
    return ModelConstants(lam, alpha)


def _positive(arr, name):
    a = np.array(arr, dtype=float)
    if a.ndim != 1 or not np.all(np.isfinite(a)):
        raise BadGeometry(f"{name} must be a finite 1-d array")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WaveguideGeometry:
    """Disk-loaded waveguide dimensions in cm.

    Cells ``k_min .. k_max`` have radius ``b``, length ``d`` and disk
    thickness ``t``. ``a`` holds the iris radii on ``k_min .. k_max + 1``;
    ``a[k]`` joins cells ``k - 1`` and ``k``.
    """

    k_min: int
    a: np.ndarray
    b: np.ndarray
    d: np.ndarray
    t: np.ndarray
    b_star: float
    d_star: float
    use_p_polynomials: bool = False

    def __post_init__(self):
        for name in ("a", "b", "d", "t"):
            object.__setattr__(self, name, _positive(getattr(self, name), name))
        n = len(self.b)
        if n < 1 or len(self.d) != n or len(self.t) != n or len(self.a) != n + 1:
            raise BadGeometry("need n cells with n + 1 iris radii")
        if np.any(self.b <= 0) or np.any(self.d <= 0) or np.any(self.t < 0):
            raise BadGeometry("cell sizes must be positive")
        if np.any(self.a < 0):
            raise BadGeometry("iris radii must be non-negative")
        if np.any(self.a[:-1] >= self.b) or np.any(self.a[1:] >= self.b):
            raise BadGeometry("iris radius must stay below the cell radius")
        if not (self.b_star > 0 and self.d_star > 0):
            raise BadGeometry("normalizing sizes must be positive")

    @property
    def k_max(self) -> int:
        return self.k_min + len(self.b) - 1

    def __len__(self):
        return len(self.b)


def _hole_terms(geom: WaveguideGeometry, consts: ModelConstants):
    """``u`` and ``u * pbar`` for every iris."""
    a = geom.a
    if geom.use_p_polynomials:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", FitRangeWarning)
            ps, pc = np.vectorize(p_polynomials)(a)
        if np.any((a <= FIT_RANGE[0]) | (a > FIT_RANGE[1])):
            warnings.warn("some iris radii lie outside the fitted range (0, 2] cm",
                          FitRangeWarning, stacklevel=3)
    else:
        ps = pc = np.ones_like(a)
    u = consts.alpha * a ** 3 * pc / (geom.b_star ** 2 * geom.d_star)
    with np.errstate(divide="ignore", invalid="ignore"):
        up = np.where(pc != 0, u * ps / pc, 0.0)
    return u, up


def _coupling_arrays(geom: WaveguideGeometry, consts: ModelConstants):
    u, up = _hole_terms(geom, consts)
    bt = geom.b / geom.b_star
    dt = geom.d / geom.d_star
    norm = bt * bt * dt
    a_kk = -(up[:-1] + up[1:]) / norm
    a_km1 = u[:-1] / norm
    a_kp1 = u[1:] / norm
    Z = 1.0 - bt * bt - a_kk
    return a_kk, a_km1, a_kp1, Z


def coupling_coeffs(geom: WaveguideGeometry, consts: ModelConstants,
                    k: int) -> tuple[float, float, float, float]:
    """``(alpha_kk, alpha_km1, alpha_kp1, Z)`` of cell ``k``, lossless."""
    if not geom.k_min <= k <= geom.k_max:
        raise BadGeometry(f"cell {k} is outside [{geom.k_min}, {geom.k_max}]")
    i = k - geom.k_min
    return tuple(float(v[i]) for v in _coupling_arrays(geom, consts))


def coeffs_from_geometry(geom: WaveguideGeometry,
                         consts: ModelConstants | None = None) -> CoefficientSequence:
    """Recurrence of the cavity chain, in canonical indexing ``k - 1``."""
    consts = consts or model_constants()
    _, a_km1, a_kp1, Z = _coupling_arrays(geom, consts)
    bad = np.flatnonzero(a_kp1 == 0)
    if bad.size:
        raise BadGeometry("coupling to the next cell vanishes", cell=geom.k_min + int(bad[0]))
    bad = np.flatnonzero(a_km1 == 0)
    if bad.size:
        raise BadGeometry("coupling to the previous cell vanishes",
                          cell=geom.k_min + int(bad[0]))
    return CoefficientSequence(geom.k_min - 1, a_km1 / a_kp1, -Z / a_kp1)


def geometry_from_phase(profile: PhaseProfile, k_lo: int = 1, k_hi: int | None = None,
                        a_in: float = 1.0, frequency: float = DEFAULT_FREQUENCY,
                        d: float = DEFAULT_D_STAR, t: float = DEFAULT_THICKNESS,
                        consts: ModelConstants | None = None) -> WaveguideGeometry:
    """Identical cells whose irises realize the profile's normalized coupling.

    The iris of the first plateau has radius ``a_in``. The common cell radius
    is set so that this plateau is a passband with phase advance ``phi_I``,
    which turns the cavity equation into the phase-profile recurrence.
    Cells cover ``k_lo .. k_hi`` (default ``1 .. N + 1``).
    """
    consts = consts or model_constants()
    if k_hi is None:
        k_hi = profile.N + 1
    if k_hi < k_lo:
        raise BadWindow("empty cell window")
    b_star = SPEED_OF_LIGHT_CM * consts.lambda01 / (2.0 * math.pi * frequency)
    d_star = d
    u_I = consts.alpha * a_in ** 3 / (b_star ** 2 * d_star)
    # plateau dispersion: (bt**2 - 1) bt**2 dt = 2 u_I (1 - cos phi_I), with dt = 1
    bt2 = 0.5 * (1.0 + math.sqrt(1.0 + 8.0 * u_I * (1.0 - math.cos(profile.phi_I))))
    holes = np.arange(k_lo, k_hi + 2)
    u = u_I * u_bar(profile, holes)
    a = np.cbrt(u * b_star ** 2 * d_star / consts.alpha)
    n = k_hi - k_lo + 1
    return WaveguideGeometry(k_lo, a, np.full(n, math.sqrt(bt2) * b_star),
                             np.full(n, d), np.full(n, t), b_star, d_star)
