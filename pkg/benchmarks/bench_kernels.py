#!/usr/bin/env python3
"""Benchmark the clustering hot kernels: numba-jitted versus pure numpy.

The similarity stage ranks every context vector row and correlates all row
pairs; at realistic scale (thousands of target words) this dominates the
pipeline, which is why the kernels carry @njit with an env-flag fallback
(LEXFORGE_NO_NUMBA=1).  Run:

    python benchmarks/bench_kernels.py [--targets 600] [--dims 600] [--repeat 5]
"""

import argparse
import time

import numpy as np

from lexforge import kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--targets", type=int, default=600)
    parser.add_argument("--dims", type=int, default=600)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    mat = rng.integers(0, 30, size=(args.targets, args.dims)).astype(np.float64)

    rows = [("kernel", "numpy", kernels.backend_name(), "speedup")]

    if kernels.USE_NUMBA:
        # trigger compilation outside the timed region
        kernels.rank_rows(mat[:4])
        kernels.pairwise_corr(mat[:4])
        kernels.pairwise_cosine(mat[:4])

    for name, np_fn, fast_fn in (
        ("rank_rows", kernels._rank_rows_np, kernels.rank_rows),
        ("pairwise_corr", kernels._pairwise_corr_np, kernels.pairwise_corr),
        ("pairwise_cosine", kernels._pairwise_cosine_np, kernels.pairwise_cosine),
    ):
        base = best_of(lambda: np_fn(mat), args.repeat)
        fast = best_of(lambda: fast_fn(mat), args.repeat)
        rows.append((name, f"{base * 1e3:.1f} ms", f"{fast * 1e3:.1f} ms",
                     f"{base / fast:.2f}x"))

    widths = [max(len(r[i]) for r in rows) for i in range(4)]
    for r in rows:
        print("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    if not kernels.USE_NUMBA:
        print("\n(LEXFORGE_NO_NUMBA=1 or numba unavailable: both columns ran "
              "the numpy path)")


if __name__ == "__main__":
    main()
