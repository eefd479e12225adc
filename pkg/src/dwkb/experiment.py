"""Benchmark runs: configuration, method orchestration, comparison and output.

Every method is anchored to unit incident amplitude at cell 1, and all
per-cell series live on cells ``1 .. N``. Phases are reported cumulatively
(running sum of per-cell increments, zero at cell 1).
"""
from __future__ import annotations

import ast
import csv
import json
import math
import operator
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .closed_form import delta_p_estimate, delta_p_sum, wkb_expsum_direct, wkb_expsum_riccati
from .dlw import coeffs_from_phase, linear_ramp_profile, u_bar
from .errors import BadWindow, ConfigError, MissingBaseline, ZeroAmplitude
from .recurrence import ScatterBoundary, SolutionProfile, assign_branches, direct_scatter_solve, flux_series
from .scattering import scatter
from .wavesplit import (
    GaugeSequences,
    riccati_approx_roots,
    riccati_residual,
    transfer_exact,
    transfer_wkb_direct,
    transfer_wkb_riccati,
)

METHODS = ("exact", "wkb-riccati", "wkb-direct", "closed-riccati", "closed-direct", "oracle")
FORMATS = ("csv", "json")
COMPARED = ("wkb-riccati", "wkb-direct")

__all__ = [
    "METHODS", "ExperimentConfig", "load_config", "MethodResult", "ComparisonReport",
    "solve_methods", "run_experiment", "phase_shift_series", "cumulative_phase",
    "compare_methods", "emit_outputs", "riccati_scaling",
]


# ---------------------------------------------------------------- config

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub,
           ast.Mult: operator.mul, ast.Div: operator.truediv}
_NAMES = {"pi": math.pi}


def _eval_number(text: str) -> float:
    """Evaluate a small arithmetic expression such as ``2*pi/3``."""
    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        raise ConfigError(f"unsupported expression {text!r}")
    try:
        tree = ast.parse(str(text).strip(), mode="eval")
    except SyntaxError as exc:
        raise ConfigError(f"cannot parse {text!r}") from exc
    try:
        return ev(tree)
    except ZeroDivisionError as exc:
        raise ConfigError(f"division by zero in {text!r}") from exc


def _as_phase(value, name) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{name} must be a number")
    if isinstance(value, (int, float)):
        v = float(value)
    elif isinstance(value, str):
        v = _eval_number(value)
    else:
        raise ConfigError(f"{name} must be a number or expression")
    if not 0.0 < v < math.pi:
        raise ConfigError(f"{name}={v!r} is outside the passband (0, pi)")
    return v


def _as_int(value, name) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ConfigError(f"{name} must be an integer")
    try:
        return int(value)
    except ValueError as exc:
        raise ConfigError(f"{name} must be an integer") from exc


def _as_methods(value) -> tuple[str, ...]:
    if value is None:
        return ()
    if isinstance(value, str):
        items = [m.strip() for m in value.split(",") if m.strip()]
    elif isinstance(value, (list, tuple, set)):
        items = [str(m).strip() for m in value]
    else:
        raise ConfigError("methods must be a list or comma separated string")
    unknown = sorted(set(items) - set(METHODS))
    if unknown:
        raise ConfigError(f"unknown methods {unknown}; choose from {list(METHODS)}")
    return tuple(m for m in METHODS if m in items)


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated run parameters. ``methods`` is kept in canonical order."""

    phi_I: float = math.pi / 3
    phi_II: float = 2 * math.pi / 3
    N: int = 250
    N_h: int = 100
    methods: tuple[str, ...] = ("exact",)
    output_dir: str = "out"
    format: str = "csv"

    FIELDS = ("phi_I", "phi_II", "N", "N_h", "methods", "output_dir", "format")

    @classmethod
    def from_mapping(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a mapping")
        unknown = sorted(set(data) - set(cls.FIELDS))
        if unknown:
            raise ConfigError(f"unknown configuration keys {unknown}")
        d = cls()
        cfg = cls(
            phi_I=_as_phase(data.get("phi_I", d.phi_I), "phi_I"),
            phi_II=_as_phase(data.get("phi_II", d.phi_II), "phi_II"),
            N=_as_int(data.get("N", d.N), "N"),
            N_h=_as_int(data.get("N_h", d.N_h), "N_h"),
            methods=_as_methods(data.get("methods", list(d.methods))),
            output_dir=str(data.get("output_dir", d.output_dir)),
            format=str(data.get("format", d.format)),
        )
        cfg.validate()
        return cfg

    def validate(self):
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if not self.N > 2 * self.N_h >= 0:
            raise ConfigError(f"need N > 2 N_h >= 0, got N={self.N}, N_h={self.N_h}")
        if self.N < 2:
            raise ConfigError("need at least two cells")
        for name in ("phi_I", "phi_II"):
            _as_phase(getattr(self, name), name)
        _as_methods(list(self.methods))

    def to_dict(self) -> dict:
        return {"phi_I": self.phi_I, "phi_II": self.phi_II, "N": self.N, "N_h": self.N_h,
                "methods": list(self.methods), "output_dir": self.output_dir,
                "format": self.format}


def load_config(path: str | os.PathLike | None = None, **overrides) -> ExperimentConfig:
    """Read a flat YAML mapping and apply non-``None`` overrides on top."""
    data = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                data = yaml.safe_load(fh) or {}
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except yaml.YAMLError as exc:
            raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{path} must hold a flat mapping")
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_mapping(data)


# ---------------------------------------------------------------- series

def phase_shift_series(values, k_min: int = 1) -> np.ndarray:
    """``arg y[k+1] - arg y[k]`` wrapped to ``(-pi, pi]``, one entry per pair."""
    y = np.asarray(values, dtype=np.complex128)
    if y.ndim != 1 or len(y) < 2:
        raise BadWindow("phase shifts need at least two samples")
    zero = np.flatnonzero(y == 0)
    if zero.size:
        raise ZeroAmplitude("amplitude vanishes", cell=k_min + int(zero[0]))
    out = np.angle(y[1:] / y[:-1])
    # np.angle gives [-pi, pi]; move the closed end to +pi
    return np.where(out == -np.pi, np.pi, out)


def cumulative_phase(values, k_min: int = 1) -> np.ndarray:
    """Running sum of phase shifts, zero on the first sample."""
    return np.concatenate(([0.0], np.cumsum(phase_shift_series(values, k_min))))


# ---------------------------------------------------------------- methods

@dataclass(frozen=True, eq=False)
class MethodResult:
    """Outcome of one method on cells ``1 .. N`` plus the value beyond ``N``."""

    name: str
    R: complex
    T: complex
    y: np.ndarray
    y_next: complex
    k_min: int = 1

    @property
    def ks(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_min + len(self.y))

    @property
    def abs_y(self) -> np.ndarray:
        return np.abs(self.y)

    @property
    def phase_shift(self) -> np.ndarray:
        return phase_shift_series(np.append(self.y, self.y_next), self.k_min)

    @property
    def arg_y(self) -> np.ndarray:
        return cumulative_phase(self.y, self.k_min)


@dataclass
class _Chain:
    config: ExperimentConfig
    profile: object
    seq: object
    roots: object


def _chain(config: ExperimentConfig) -> _Chain:
    profile = linear_ramp_profile(config.phi_I, config.phi_II, config.N_h, config.N)
    seq = coeffs_from_phase(profile)
    roots = assign_branches(seq.window(1, config.N))
    return _Chain(config, profile, seq, roots)


def _matrix_method(name, chain, build):
    sol = scatter(build(chain.roots))
    N = chain.config.N
    if sol.k_min != 1 or sol.k_max != N:
        raise BadWindow(f"method window [{sol.k_min}, {sol.k_max}] differs from [1, {N}]")
    # value beyond the last cell from the splitting condition
    y_next = chain.roots.rho1[-1] * sol.y1[-1] + chain.roots.rho2[-1] * sol.y2[-1]
    return MethodResult(name, sol.R, sol.T, np.array(sol.y), complex(y_next))


def _closed_method(name, chain, form):
    N = chain.config.N
    cf = form(chain.seq, chain.roots, 1, 1, N, 1.0)
    y = np.array(cf.values)
    return MethodResult(name, 0j, complex(y[-1]), y, complex(chain.roots.rho1[-1] * y[-1]))


def _oracle_method(chain):
    cfg = chain.config
    sol = direct_scatter_solve(chain.seq.window(0, cfg.N - 1),
                               ScatterBoundary(cfg.phi_I, cfg.phi_II))
    y = np.array(sol.y[1:-1])
    return MethodResult("oracle", sol.R, sol.T, y, complex(sol.y[-1]))


_RUNNERS = {
    "exact": lambda c: _matrix_method("exact", c, transfer_exact),
    "wkb-riccati": lambda c: _matrix_method("wkb-riccati", c, transfer_wkb_riccati),
    "wkb-direct": lambda c: _matrix_method("wkb-direct", c, transfer_wkb_direct),
    "closed-riccati": lambda c: _closed_method("closed-riccati", c, wkb_expsum_riccati),
    "closed-direct": lambda c: _closed_method("closed-direct", c, wkb_expsum_direct),
    "oracle": _oracle_method,
}


def solve_methods(config: ExperimentConfig) -> dict[str, MethodResult]:
    """Run every selected method; returns results keyed by method name."""
    config.validate()
    if not config.methods:
        return {}
    chain = _chain(config)
    return {m: _RUNNERS[m](chain) for m in config.methods}


# ---------------------------------------------------------------- comparison

@dataclass(eq=False)
class ComparisonReport:
    """Per-method results plus deviations from the exact baseline.

    ``deviations[m]`` holds ``(|y| - |y_exact|, Phi - Phi_exact)`` on cells
    ``1 .. N``. ``phase_gap`` is ``arg(y_riccati / y_direct)`` per cell when
    both WKB propagators ran. ``flux`` is the conserved flux of the exact
    profile on cells ``1 .. N``.
    """

    config: ExperimentConfig
    methods: dict[str, MethodResult]
    deviations: dict[str, tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)
    phase_gap: np.ndarray | None = None
    phase_gap_predicted: float | None = None
    delta_p: complex | None = None
    flux: np.ndarray | None = None
    flux_defect: float | None = None
    flux_identity_defect: float | None = None

    @property
    def phase_gap_end(self) -> float | None:
        return None if self.phase_gap is None else float(self.phase_gap[-1])


def _flux(config, profile, res: MethodResult):
    y = np.append(res.y, res.y_next)
    P = flux_series(SolutionProfile(1, y), lambda k: float(u_bar(profile, k)))
    scale = np.max(np.abs(P))
    defect = float(np.max(np.abs(P - P[0])) / scale) if scale > 0 else 0.0
    lhs = (1.0 - abs(res.R) ** 2) * math.sin(config.phi_I)
    ubar_II = (1.0 - math.cos(config.phi_I)) / (1.0 - math.cos(config.phi_II))
    rhs = abs(res.T) ** 2 * ubar_II * math.sin(config.phi_II)
    return P, defect, float(abs(lhs - rhs) / max(abs(lhs), abs(rhs)))


def compare_methods(methods: dict[str, MethodResult], config: ExperimentConfig) -> ComparisonReport:
    """Deviation series of every method against ``methods["exact"]``."""
    if "exact" not in methods:
        raise MissingBaseline("the exact method is required as baseline")
    base = methods["exact"]
    report = ComparisonReport(config, dict(methods))
    b_abs, b_phi = base.abs_y, base.phase_shift
    for name, res in methods.items():
        if len(res.y) != len(base.y) or res.k_min != base.k_min:
            raise BadWindow(f"method {name} covers a different window")
        report.deviations[name] = (res.abs_y - b_abs, res.phase_shift - b_phi)
    if all(m in methods for m in COMPARED):
        a, b = methods[COMPARED[0]].y, methods[COMPARED[1]].y
        report.phase_gap = np.angle(a / b)
        report.phase_gap_predicted = float(np.imag(delta_p_estimate(config.phi_I, config.phi_II)))
    profile = linear_ramp_profile(config.phi_I, config.phi_II, config.N_h, config.N)
    seq = coeffs_from_phase(profile)
    report.delta_p = delta_p_sum(seq, 1, config.N)
    report.flux, report.flux_defect, report.flux_identity_defect = _flux(config, profile, base)
    return report


def run_experiment(config: ExperimentConfig) -> ComparisonReport:
    """Solve all selected methods; compare when the exact baseline is among them."""
    methods = solve_methods(config)
    if "exact" in methods:
        return compare_methods(methods, config)
    return ComparisonReport(config, methods)


# ---------------------------------------------------------------- output

def _num(x: float) -> str:
    return repr(float(x))


def _write_csv(path: Path, header, rows):
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _series(res: MethodResult) -> dict:
    return {"k": res.ks.tolist(), "abs_y": res.abs_y.tolist(),
            "arg_y": res.arg_y.tolist(), "phase_shift": res.phase_shift.tolist()}


def _cabs(z: complex) -> dict:
    return {"abs": float(abs(z)), "arg": float(np.angle(z))}


def summary_dict(report: ComparisonReport) -> dict:
    out = {}
    for name, res in report.methods.items():
        out[name] = {"R": _cabs(res.R), "T": _cabs(res.T)}
    if report.phase_gap is not None:
        out["phase_gap"] = {"value": report.phase_gap_end,
                            "predicted": report.phase_gap_predicted}
    if report.delta_p is not None:
        out["delta_p"] = {"re": report.delta_p.real, "im": report.delta_p.imag}
    if report.flux_defect is not None:
        out["flux_defect"] = report.flux_defect
        out["flux_identity_defect"] = report.flux_identity_defect
    out["config"] = report.config.to_dict()
    return out


def emit_outputs(report: ComparisonReport, config: ExperimentConfig | None = None) -> list[Path]:
    """Write series and summary files into ``config.output_dir``.

    CSV format writes ``<method>.csv`` per method and ``comparison.csv`` when
    both WKB propagators were compared against the exact run. JSON format
    puts the same series into ``series.json``. ``summary.json`` is always
    written. Returns the written paths.
    """
    config = config or report.config
    outdir = Path(config.output_dir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {outdir}: {exc}") from exc
    written = []
    have_cmp = all(m in report.deviations for m in COMPARED)
    if config.format == "csv":
        for name, res in report.methods.items():
            path = outdir / f"{name}.csv"
            rows = ([int(k), _num(a), _num(p), _num(s)]
                    for k, a, p, s in zip(res.ks, res.abs_y, res.arg_y, res.phase_shift))
            _write_csv(path, ["k", "abs_y", "arg_y", "phase_shift"], rows)
            written.append(path)
        if have_cmp:
            (a1, p1), (a2, p2) = (report.deviations[m] for m in COMPARED)
            ks = report.methods["exact"].ks
            path = outdir / "comparison.csv"
            rows = ([int(k), _num(x1), _num(x2), _num(q1), _num(q2)]
                    for k, x1, x2, q1, q2 in zip(ks, a1, a2, p1, p2))
            _write_csv(path, ["k", "d_abs_m1", "d_abs_m2", "d_phase_m1", "d_phase_m2"], rows)
            written.append(path)
    elif report.methods:
        payload = {"methods": {n: _series(r) for n, r in report.methods.items()}}
        if have_cmp:
            payload["comparison"] = {
                m: {"d_abs": report.deviations[m][0].tolist(),
                    "d_phase": report.deviations[m][1].tolist()} for m in COMPARED}
        if report.phase_gap is not None:
            payload["phase_gap"] = report.phase_gap.tolist()
        if report.flux is not None:
            payload["flux"] = report.flux.tolist()
        path = outdir / "series.json"
        _write_text(path, json.dumps(payload, indent=1) + "\n")
        written.append(path)
    path = outdir / "summary.json"
    _write_text(path, json.dumps(summary_dict(report), indent=2) + "\n")
    written.append(path)
    return written


def _write_text(path: Path, text: str):
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


# ---------------------------------------------------------------- scaling study

def riccati_scaling(phi_I: float, phi_II: float, N_h: int, ramps=(25, 50, 100, 200),
                    margin: int = 3, branch: int = 1) -> list[dict]:
    """Riccati residuals of the corrected and the plain root gauge per ramp length.

    The residual is taken over the ramp interior, ``margin`` cells away from
    the two slope kinks where the profile is not smooth.
    """
    rows = []
    for L in ramps:
        N = 2 * N_h + L
        seq = coeffs_from_phase(linear_ramp_profile(phi_I, phi_II, N_h, N))
        roots = assign_branches(seq)
        k_range = (N_h + margin, N - N_h - margin - 1)
        rows.append({
            "ramp": int(L),
            "corrected": riccati_residual(riccati_approx_roots(roots), seq, branch, k_range),
            "roots": riccati_residual(GaugeSequences.from_roots(roots), seq, branch, k_range),
        })
    for prev, row in zip(rows, rows[1:]):
        row["corrected_ratio"] = prev["corrected"] / row["corrected"]
        row["roots_ratio"] = prev["roots"] / row["roots"]
    return rows
