"""Time the numba kernels against their numpy fallbacks.

Usage: python benchmarks/bench_kernels.py [--repeat 5] [--scale 1.0]

Inputs are shaped like MovieLens 100K at K=200 (scale multiplies the user
count). The first numba call is a warm-up, so compile time is excluded.
"""

import argparse
import time

import numpy as np

from synthratings.clustering import _assign_numba, _assign_numpy
from synthratings.recommenders.bpr import _sgd_numba, _sgd_numpy
from synthratings.recommenders.wrmf import _solve_side_numba, _solve_side_numpy
from synthratings.sampling import _draw_batch_numba, _draw_batch_numpy


def random_csr(rng, n, m, per_row):
    counts = rng.integers(1, 2 * per_row, size=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(counts)
    indices = np.concatenate([np.sort(rng.choice(m, size=c, replace=False)) for c in counts]).astype(np.int64)
    return indptr, indices


def cases(scale, rng):
    n, m, k, f = int(943 * scale), 1447, 200, 10
    indptr, indices = random_csr(rng, n, m, 60)
    cent = rng.random((k, m)) * 0.2
    cnorm = (cent ** 2).sum(axis=1)
    yield "kmeans assign", (_assign_numba, _assign_numpy), lambda: (indptr, indices, cent, cnorm)

    sizes_per_group = rng.integers(50, 800, size=k)
    offsets = np.zeros(k + 1, dtype=np.int64)
    offsets[1:] = np.cumsum(sizes_per_group)
    flat = rng.integers(1, 40, size=offsets[-1]).astype(np.int64)
    groups = rng.integers(0, k, size=n).astype(np.int64)
    sizes = np.minimum(rng.integers(20, 120, size=n), sizes_per_group[groups]).astype(np.int64)
    u = rng.random(int(sizes.sum()))
    yield "item draws", (_draw_batch_numba, _draw_batch_numpy), lambda: (offsets, flat, groups, sizes, u)

    W = rng.normal(0, 0.1, (n, f))
    H = rng.normal(0, 0.1, (m, f))
    t = 44_000
    trip = (rng.integers(0, n, t), rng.integers(0, m, t), rng.integers(0, m, t))
    yield "bpr sgd epoch", (_sgd_numba, _sgd_numpy), lambda: (W.copy(), H.copy(), *trip, 0.05, 0.0025)

    Y = rng.normal(0, 0.1, (m, f))
    yield "wrmf user solve", (_solve_side_numba, _solve_side_numpy), lambda: (indptr, indices, Y, Y.T @ Y, 1.0, 0.015)


def bench(fn, make_args, repeat):
    best = np.inf
    for _ in range(repeat):
        args = make_args()
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--scale", type=float, default=1.0)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<18}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, (fast, slow), make_args in cases(args.scale, rng):
        fast(*make_args())  # compile
        tf = bench(fast, make_args, args.repeat)
        ts = bench(slow, make_args, args.repeat)
        print(f"{name:<18}{tf * 1e3:>12.2f}{ts * 1e3:>12.2f}{ts / tf:>9.1f}x")


if __name__ == "__main__":
    main()
