#!/usr/bin/env python3
"""Benchmark the per-level summation kernels: compiled loops vs pure numpy.

Run:  python benchmarks/bench_kernels.py
The numpy path is what SPHSHIFT_NO_NUMBA=1 selects at import time; here we
time both implementations side by side and check they agree.
"""

import time

import numpy as np

from sphshift import _kernels


def timeit(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    if _kernels.BACKEND != "numba":
        print("numba backend unavailable (SPHSHIFT_NO_NUMBA set or numba missing);")
        print("timing the numpy path only.\n")

    rng = np.random.default_rng(7)
    cases = [
        ("self_level_powersums  m=2 kmax=200", "self_level_powersums",
         (rng.uniform(0.2, 3.0, 201), 2, 2.0)),
        ("self_level_powersums  m=2 kmax=2000", "self_level_powersums",
         (rng.uniform(0.2, 3.0, 2001), 2, 2.0)),
        ("self_level_powersums  m=4 kmax=2000", "self_level_powersums",
         (rng.uniform(0.2, 3.0, 2001), 4, 1.0)),
        ("cross_level_powersums m=3 kmax=200", "cross_level_powersums",
         (rng.uniform(0.2, 3.0, 201), 3, 2.0)),
        ("cross_level_powersums m=3 kmax=2000", "cross_level_powersums",
         (rng.uniform(0.2, 3.0, 2001), 3, 2.0)),
        ("pairsum               m=3 k=100000", "pairsum", (100_000, 3, 2.0, 1.0)),
        ("abs_sum               m=3 k=100000", "abs_sum", (100_000, 3, 2.0, 0.37)),
        ("kahan_cumsum          n=1000000", "kahan_cumsum",
         (rng.uniform(-1, 1, 1_000_000),)),
    ]

    header = f"{'kernel':42s} {'numpy':>10s} {'numba':>10s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for label, name, args in cases:
        np_fn = getattr(_kernels, name + "_numpy")
        t_np, out_np = timeit(np_fn, *args)
        if _kernels.BACKEND == "numba":
            nb_fn = getattr(_kernels, name)
            nb_fn(*args)  # warm the JIT before timing
            t_nb, out_nb = timeit(nb_fn, *args)
            np.testing.assert_allclose(out_np, out_nb, rtol=1e-9, atol=1e-9)
            print(f"{label:42s} {t_np*1e3:9.2f}ms {t_nb*1e3:9.2f}ms {t_np/t_nb:7.1f}x")
        else:
            print(f"{label:42s} {t_np*1e3:9.2f}ms {'-':>10s} {'-':>8s}")


if __name__ == "__main__":
    main()
