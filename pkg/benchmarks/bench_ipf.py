#!/usr/bin/env python3
"""Benchmark the compiled fitting kernel against the NumPy fallback.

Runs identical proportional-fitting workloads through both kernels and
reports per-fit wall time.  Small tables are where the compiled kernel
pays off (per-sweep NumPy dispatch overhead dominates actual arithmetic);
large tables converge toward memory-bandwidth parity.

Usage: python benchmarks/bench_ipf.py [--repeats 25]
"""

import argparse
import time

import numpy as np

from tabcop import _ipf_py

try:
    from tabcop import _ipf_cy
except ImportError:
    _ipf_cy = None


def make_case(rng, n_rows, n_cols, skew):
    values = rng.random((n_rows, n_cols)) ** skew + 1e-9
    values /= values.sum()
    rt = rng.random(n_rows) + 0.05
    ct = rng.random(n_cols) + 0.05
    return values, rt / rt.sum(), ct / ct.sum()


def run_kernel(kernel, case, tol, max_iter, repeats):
    values, rt, ct = case
    hist = np.empty(16)
    l1 = np.empty(16)
    best = float("inf")
    sweeps = 0
    for _ in range(repeats):
        work = values.copy()
        start = time.perf_counter()
        sweeps, err = kernel.ipf_sweeps(work, rt, ct, tol, max_iter, hist, l1)
        best = min(best, time.perf_counter() - start)
        assert err <= tol, "benchmark case failed to converge"
    return best, sweeps


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=25)
    parser.add_argument("--tol", type=float, default=1e-12)
    args = parser.parse_args()

    rng = np.random.default_rng(7)
    cases = [
        ("2x2 mild", make_case(rng, 2, 2, 1)),
        ("5x5 mild", make_case(rng, 5, 5, 1)),
        ("5x5 skewed", make_case(rng, 5, 5, 6)),
        ("32x32 mild", make_case(rng, 32, 32, 1)),
        ("64x64 skewed", make_case(rng, 64, 64, 4)),
        ("256x256 mild", make_case(rng, 256, 256, 1)),
    ]

    print(f"{'case':<14}{'sweeps':>8}{'numpy':>12}{'cython':>12}{'speedup':>9}")
    for name, case in cases:
        t_py, sweeps = run_kernel(_ipf_py, case, args.tol, 10**6, args.repeats)
        row = f"{name:<14}{sweeps:>8}{t_py * 1e6:>10.1f}us"
        if _ipf_cy is not None:
            t_cy, _ = run_kernel(_ipf_cy, case, args.tol, 10**6, args.repeats)
            row += f"{t_cy * 1e6:>10.1f}us{t_py / t_cy:>8.1f}x"
        else:
            row += f"{'not built':>12}{'-':>9}"
        print(row)

    if _ipf_cy is None:
        print("\ncompiled kernel unavailable; install with the extension built")


if __name__ == "__main__":
    main()
