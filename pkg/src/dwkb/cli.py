"""Command line entry point ``dwkb``.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .dlw import coeffs_from_geometry, coeffs_from_phase, geometry_from_phase, linear_ramp_profile
from .errors import BadWindow, ConfigError, DwkbError, NumericalError
from .experiment import METHODS, emit_outputs, load_config, riccati_scaling, run_experiment
from .recurrence import assign_branches

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _common(p: argparse.ArgumentParser, methods: bool = False):
    p.add_argument("--config", help="flat YAML file with run parameters")
    p.add_argument("--phi-in", dest="phi_I", help="phase advance of the left lead, e.g. pi/3")
    p.add_argument("--phi-out", dest="phi_II", help="phase advance of the right lead")
    p.add_argument("--cells", dest="N", type=int, help="number of cells N")
    p.add_argument("--lead-cells", dest="N_h", type=int, help="plateau length at each end")
    p.add_argument("--out", dest="output_dir", help="output directory")
    p.add_argument("--format", choices=("csv", "json"), help="series file format")
    if methods:
        p.add_argument("--methods", help=f"comma separated subset of {','.join(METHODS)}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dwkb", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("scatter", help="run the benchmark chain and write outputs"), True)
    _common(sub.add_parser("compare", help="run all methods and the deviation report"), True)
    _common(sub.add_parser("dispersion", help="characteristic roots along the profile"))
    p = sub.add_parser("riccati-check", help="Riccati residual versus ramp length")
    _common(p)
    p.add_argument("--ramps", default="25,50,100,200", help="comma separated ramp lengths")
    _common(sub.add_parser("geometry", help="iris radii realizing the profile and their recurrence"))
    return parser


def _config(args, default_methods=None):
    overrides = {k: getattr(args, k, None)
                 for k in ("phi_I", "phi_II", "N", "N_h", "output_dir", "format")}
    overrides["methods"] = getattr(args, "methods", None)
    if overrides["methods"] is None and default_methods is not None and args.config is None:
        overrides["methods"] = list(default_methods)
    return load_config(args.config, **overrides)


def _num(x) -> str:
    return repr(float(x))


def _write_rows(path, header, rows):
    if path is None:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _out_file(args, name):
    if args.output_dir is None:
        return None
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    return outdir / name


def cmd_scatter(args, default_methods=("exact",)):
    cfg = _config(args, default_methods)
    report = run_experiment(cfg)
    for path in emit_outputs(report, cfg):
        print(path)
    for name, res in report.methods.items():
        print(f"{name}: |R|={abs(res.R):.6g} |T|={abs(res.T):.6f}", file=sys.stderr)
    return EXIT_OK


def cmd_compare(args):
    return cmd_scatter(args, METHODS)


def cmd_dispersion(args):
    cfg = _config(args)
    profile = linear_ramp_profile(cfg.phi_I, cfg.phi_II, cfg.N_h, cfg.N)
    roots = assign_branches(coeffs_from_phase(profile))
    rows = ([int(k), _num(z1.real), _num(z1.imag), _num(z2.real), _num(z2.imag),
             _num(abs(z1)), _num(profile.phase(k + 1))]
            for k, z1, z2 in zip(roots.ks, roots.rho1, roots.rho2))
    _write_rows(_out_file(args, "dispersion.csv"),
                ["k", "re_rho1", "im_rho1", "re_rho2", "im_rho2", "abs_rho", "phi_next"], rows)
    return EXIT_OK


def cmd_riccati_check(args):
    cfg = _config(args)
    try:
        ramps = [int(r) for r in args.ramps.split(",") if r.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad ramp list {args.ramps!r}") from exc
    if not ramps or min(ramps) < 1:
        raise ConfigError("ramp lengths must be positive")
    rows = riccati_scaling(cfg.phi_I, cfg.phi_II, cfg.N_h, ramps)
    text = json.dumps(rows, indent=2) + "\n"
    path = _out_file(args, "riccati_check.json")
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return EXIT_OK


def cmd_geometry(args):
    cfg = _config(args)
    profile = linear_ramp_profile(cfg.phi_I, cfg.phi_II, cfg.N_h, cfg.N)
    geom = geometry_from_phase(profile)
    seq = coeffs_from_geometry(geom)
    ref = coeffs_from_phase(profile, seq.k_min, seq.k_max)
    rows = ([int(k), _num(geom.a[i]), _num(geom.b[i]), _num(geom.d[i]), _num(geom.t[i]),
             _num(seq.f1[i].real), _num(seq.f0[i].real),
             _num(abs(seq.f1[i] - ref.f1[i]) + abs(seq.f0[i] - ref.f0[i]))]
            for i, k in enumerate(range(geom.k_min, geom.k_max + 1)))
    _write_rows(_out_file(args, "geometry.csv"),
                ["k", "a", "b", "d", "t", "f1", "f0", "mismatch"], rows)
    return EXIT_OK


COMMANDS = {"scatter": cmd_scatter, "compare": cmd_compare, "dispersion": cmd_dispersion,
            "riccati-check": cmd_riccati_check, "geometry": cmd_geometry}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, BadWindow) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DwkbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
