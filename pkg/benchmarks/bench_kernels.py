#!/usr/bin/env python3
"""Benchmark the hot kernels on the active backend.

Run directly to benchmark the current lane; with ``--compare`` the
script re-runs itself under ``LOSBW_NO_NUMBA=1`` and prints a speedup
table (numba lane versus pure-numpy fallback).

    python benchmarks/bench_kernels.py --compare
"""

import argparse
import json
import math
import os
import subprocess
import sys
import time

import numpy as np

from losbw import kernels


def _time(fn, *args, repeat=3, warmup=1):
    for _ in range(warmup):
        fn(*args)
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def run_benchmarks():
    rng = np.random.default_rng(0)
    ls, lr = 1000.0, 20.0
    n = 20_000
    lpos = rng.uniform(-10, 10, size=n)
    rs = rng.uniform(600.0, 30_000.0, size=n)
    thetas = rng.uniform(0.1, math.pi - 0.1, size=n)
    vs = rng.normal(size=(n, 3))
    vs /= np.linalg.norm(vs, axis=1, keepdims=True)

    results = {}
    results["w_arc_batch (20k)"] = _time(
        kernels.w_arc_batch, lpos, rs, thetas, vs[:, 0], vs[:, 1], vs[:, 2], ls
    )

    def grid_many():
        for i in range(200):
            kernels.grid_extrema(lpos[i], rs[i], thetas[i],
                                 vs[i, 0], vs[i, 1], vs[i, 2], ls, 4096)

    results["grid_extrema x200 (4096 pts)"] = _time(grid_many)

    def k_many():
        for i in range(2000):
            kernels.k_number(rs[i], thetas[i], vs[i, 0], vs[i, 1], vs[i, 2],
                             ls, lr, 1e-6, 2**20)

    results["k_number x2000"] = _time(k_many)

    results["search_max3d (64x128)"] = _time(
        kernels.search_max3d, 4500.0, 1.2, ls, lr, 1e-6, 2**20, 64, 128
    )
    results["mean_k (4096 draws)"] = _time(
        kernels.mean_k, vs[:4096], 4500.0, 1.2, ls, lr, 1e-6, 2**20
    )
    sw_r = rs[:32].copy()
    sw_t = thetas[:32].copy()
    results["sweep_max3d (32 points)"] = _time(
        kernels.sweep_max3d, sw_r, sw_t, ls, lr, 1e-6, 2**20, 64, 128
    )
    return results


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--compare", action="store_true",
                        help="also run the pure-numpy lane and print speedups")
    parser.add_argument("--json", action="store_true",
                        help="emit machine-readable results")
    args = parser.parse_args()

    results = run_benchmarks()
    if args.json:
        print(json.dumps({"backend": kernels.backend(), "seconds": results}))
        return 0

    print("backend: %s" % kernels.backend())
    for name, sec in results.items():
        print("  %-30s %10.4f s" % (name, sec))

    if args.compare and kernels.backend() == "numba":
        env = dict(os.environ, LOSBW_NO_NUMBA="1")
        out = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--json"],
            env=env, capture_output=True, text=True, check=True,
        )
        other = json.loads(out.stdout)["seconds"]
        print("pure-numpy fallback and speedup:")
        for name, sec in results.items():
            print("  %-30s %10.4f s   x%.1f" % (name, other[name], other[name] / sec))
    return 0


if __name__ == "__main__":
    sys.exit(main())
