#!/usr/bin/env python3
"""Benchmark the numba kernels against the pure-numpy fallback.

Run: python benchmarks/bench_fastops.py
The active backend for the installed package follows INVTREMO_BACKEND;
this script times both implementations directly.
"""

import time

import numpy as np

from invtremo.fastops import _numpy as np_impl

try:
    from invtremo.fastops import _numba as nb_impl
except ImportError:
    nb_impl = None


def bench(label, fn, args, repeat=50):
    fn(*args)  # warm-up / jit compile
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    per_call = (time.perf_counter() - t0) / repeat
    print(f"  {label:<10} {per_call * 1e3:9.3f} ms/call")
    return per_call


def compare(name, args, repeat=50):
    print(f"{name}:")
    t_np = bench("numpy", getattr(np_impl, name), args, repeat)
    if nb_impl is not None:
        t_nb = bench("numba", getattr(nb_impl, name), args, repeat)
        print(f"  {'speedup':<10} {t_np / t_nb:9.2f}x")
    print()


def main():
    rng = np.random.default_rng(0)

    A = rng.random((150, 8))
    B = rng.random((10000, 8))
    inv_ls2 = rng.uniform(0.5, 4.0, size=8)
    compare("rbf_cross", (B, A, inv_ls2, 1.0), repeat=20)
    compare("rbf_gram", (rng.random((200, 8)), inv_ls2, 1.0))

    F = rng.random((400, 3))
    compare("nondominated_mask", (F,))
    compare("front_ranks", (F,))

    ref = rng.random((10000, 3))
    approx = rng.random((100, 3))
    compare("min_dist_mean", (ref, approx), repeat=20)


if __name__ == "__main__":
    main()
