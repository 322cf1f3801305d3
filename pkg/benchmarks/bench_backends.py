#!/usr/bin/env python3
"""Compare the compiled kernels against the NumPy fallback.

Times the two hot paths (heavy-tailed location fits and boosted-tree
training) on identical inputs and prints one table.  Run from the repository
root after building the extension:

    PYTHONPATH=src python3 benchmarks/bench_backends.py
"""

import time

import numpy as np

from selkit import backend
from selkit.core import Column, Dataset, SelLevel
from selkit.estimate import cauchy_mle_batch
from selkit.learn import fit_gbt
from selkit.rng import RngStream


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def main():
    impls = backend.available_backends()
    print(f"backends found: {', '.join(sorted(impls))}")

    rng = RngStream(7, 0)
    mus = rng.normal(500)
    Z = mus[:, None] + rng.cauchy(500 * 400).reshape(500, 400)

    n, p = 1500, 11
    X = rng.normal(n * p).reshape(n, p)
    y = X @ rng.normal(p) + 4.0 * rng.normal(n) ** 2 + rng.normal(n)
    cols = [Column(f"x{j}", X[:, j], SelLevel.RAW) for j in range(p)]
    ds = Dataset(cols + [Column("y", y, SelLevel.RAW)], "y")

    rows = []
    saved = backend.kernels
    try:
        for name in sorted(impls):
            backend.kernels = impls[name]
            t_mle = _time(lambda: cauchy_mle_batch(Z))
            t_gbt = _time(lambda: fit_gbt(ds, n_trees=100, max_depth=3))
            rows.append((name, t_mle, t_gbt))
    finally:
        backend.kernels = saved

    print(f"{'backend':<10} {'cauchy_mle_batch(500x400)':>28} {'fit_gbt(1500x11,100)':>22}")
    for name, t_mle, t_gbt in rows:
        print(f"{name:<10} {t_mle:>26.3f}s {t_gbt:>21.3f}s")
    if len(rows) == 2:
        by_name = {r[0]: r for r in rows}
        mle_speedup = by_name["python"][1] / by_name["native"][1]
        gbt_speedup = by_name["python"][2] / by_name["native"][2]
        print(f"native speedup: {mle_speedup:.1f}x on location fits, "
              f"{gbt_speedup:.1f}x on tree training")


if __name__ == "__main__":
    main()
