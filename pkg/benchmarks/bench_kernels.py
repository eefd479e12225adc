"""Time the compiled kernels against the pure-Python fallback.

Usage::

    python3 benchmarks/bench_kernels.py [--cells 2000] [--repeat 5]

Kernel timings call both modules directly. The end-to-end pipeline is timed in
a child process per backend because the selection happens at import.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from dwkb import _kernels_py

try:
    from dwkb import _kernels
except ImportError:
    _kernels = None

PIPELINE = """
import math, timeit
from dwkb import assign_branches, coeffs_from_phase, linear_ramp_profile, scatter, transfer_exact
def run():
    prof = linear_ramp_profile(math.pi / 3, 2 * math.pi / 3, {n_h}, {n})
    seq = coeffs_from_phase(prof)
    scatter(transfer_exact(assign_branches(seq.window(1, {n}))))
print(min(timeit.repeat(run, number=1, repeat={repeat})))
"""


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def kernel_cases(n, rng):
    def crand(*shape):
        return rng.normal(size=shape) + 1j * rng.normal(size=shape)
    T, F, y0 = crand(n, 2, 2) * 0.5, crand(n, 2), crand(2)
    S = crand(n, 2, 2) * 0.3
    f1, f0, frc = crand(n) * 0.3, crand(n) * 0.3, crand(n)
    a, b = crand(n), crand(n)
    return {
        "propagate": lambda k: k.propagate(T, F, y0),
        "cascade": lambda k: k.cascade(S),
        "iterate": lambda k: k.iterate(f1, f0, frc, 1j, 2.0 + 0j),
        "pair_roots": lambda k: k.pair_roots(a, b),
    }


def pipeline_time(n, repeat, pure):
    env = dict(os.environ, DWKB_PURE_PYTHON="1" if pure else "")
    code = PIPELINE.format(n=n, n_h=n // 3, repeat=repeat)
    out = subprocess.run([sys.executable, "-c", code], env=env, check=True,
                         capture_output=True, text=True)
    return float(out.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cells", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled kernels not built; run `pip install -e . --no-build-isolation`")
        return 1
    rng = np.random.default_rng(0)
    print(f"{'kernel':<12}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for name, call in kernel_cases(args.cells, rng).items():
        t_py = best(lambda: call(_kernels_py), args.repeat)
        t_cy = best(lambda: call(_kernels), args.repeat)
        print(f"{name:<12}{1e3 * t_py:>14.3f}{1e3 * t_cy:>14.3f}{t_py / t_cy:>10.1f}")
    t_py = pipeline_time(args.cells, args.repeat, pure=True)
    t_cy = pipeline_time(args.cells, args.repeat, pure=False)
    print(f"{'pipeline':<12}{1e3 * t_py:>14.3f}{1e3 * t_cy:>14.3f}{t_py / t_cy:>10.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
