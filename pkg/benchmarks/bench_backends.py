"""Timing comparison of the compiled and pure-numpy kernel backends.

Runs the three hot kernels (trajectory sweep, fixed-point iteration,
Lyapunov series) on one random certified system per dimension and reports
best-of-N wall times with the python/compiled ratio.

Usage: python benchmarks/bench_backends.py [--dims 1,2,4,6,10] [--repeats 5]
"""

import argparse
import time

import numpy as np

from riccati_lab import solve_fixed_point
from riccati_lab._backend import available_backends
from riccati_lab.systems import random_psd, random_system


def best_of(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def workloads(dim, seed=0):
    sys = random_system(dim, rng=seed, spectral_radius_target=1.1)
    gen = np.random.default_rng(seed)
    P0 = random_psd(gen, dim, norm=5.0)
    fp = solve_fixed_point(sys)
    args = (sys.A, sys.R.values, sys.S.values)
    return {
        "sweep n=200": lambda mod: mod.riccati_sweep(*args, P0, 200),
        "fixed point": lambda mod: mod.fixed_point(*args, P0, 1e-12, 100_000),
        "lyapunov": lambda mod: mod.lyapunov_series(
            fp.E, fp.F.values, 1e-13, 100_000, 20
        ),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", default="1,2,4,6,10,16",
                    help="comma-separated matrix dimensions")
    ap.add_argument("--repeats", type=int, default=5,
                    help="repeats per measurement (best is reported)")
    args = ap.parse_args()
    dims = [int(d) for d in args.dims.split(",")]

    backends = available_backends()
    if "compiled" not in backends:
        print("compiled extension not built; timing the python backend only")
    names = sorted(backends)

    header = f"{'dim':>4}  {'kernel':<12}" + "".join(f"{n:>12}" for n in names)
    if len(names) == 2:
        header += f"{'ratio':>8}"
    print(header)
    print("-" * len(header))
    for dim in dims:
        for label, call in workloads(dim).items():
            times = {}
            for name in names:
                mod = backends[name]
                call(mod)  # warm up allocators and code paths
                times[name] = best_of(lambda: call(mod), args.repeats)
            row = f"{dim:>4}  {label:<12}"
            for name in names:
                row += f"{times[name] * 1e6:>10.1f}us"
            if len(names) == 2:
                row += f"{times['python'] / times['compiled']:>7.1f}x"
            print(row)


if __name__ == "__main__":
    main()
