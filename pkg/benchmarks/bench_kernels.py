#!/usr/bin/env python3
"""Benchmark the compiled elimination kernel against the numpy fallback.

The elimination kernel dominates the runtime of inverse synthesis and
preimage extraction (every window solve, affine image and canonical form is
one elimination), so this is the number that matters.  Matrix shapes mirror
the real workloads: window systems around 100 columns and the larger
inverse-synthesis systems.

Run:  python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from linca import _kernels, _modp_py

try:
    from linca import _modp_cy
except ImportError:
    _modp_cy = None


def bench(impl, matrices, p, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        copies = [m.copy() for m in matrices]
        start = time.perf_counter()
        for m in copies:
            impl.rref_inplace(m, p)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    rng = np.random.default_rng(12345)
    cases = [
        ("window solves 90x94", 90, 94, 40),
        ("inverse synthesis 150x150", 150, 150, 20),
        ("large window 300x310", 300, 310, 5),
    ]
    print(f"selected backend at import: {_kernels.backend()}")
    if _modp_cy is None:
        print("compiled kernel not built; showing fallback timings only")
    header = f"{'case':28} {'p':>3} {'numpy (s)':>12} {'compiled (s)':>13} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, rows, cols, count in cases:
        for p in (2, 3):
            matrices = [
                rng.integers(0, p, size=(rows, cols)).astype(np.int64)
                for _ in range(count)
            ]
            t_py = bench(_modp_py, matrices, p)
            if _modp_cy is not None:
                t_cy = bench(_modp_cy, matrices, p)
                print(
                    f"{label:28} {p:>3} {t_py:>12.4f} {t_cy:>13.4f} "
                    f"{t_py / t_cy:>7.1f}x"
                )
            else:
                print(f"{label:28} {p:>3} {t_py:>12.4f} {'-':>13} {'-':>8}")


if __name__ == "__main__":
    main()
