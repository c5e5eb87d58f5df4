#!/usr/bin/env python3
"""Compare the jitted kernels against the pure-NumPy fallback.

Times the two hot kernels (cosine design matrix, random cosine features)
over a range of problem sizes and prints a table. Both implementations are
imported directly, so the result does not depend on TRIBASIS_DISABLE_NUMBA.

Usage: python benchmarks/bench_accel.py [--repeats 7]
"""

import argparse
import time

import numpy as np

from tribasis import _accel


def best_of(func, repeats):
    func()  # warm-up (includes JIT compilation on the numba side)
    best = np.inf
    for _ in range(repeats):
        start = time.perf_counter()
        func()
        best = min(best, time.perf_counter() - start)
    return best


def bench_design(repeats):
    print("cosine design matrix: points x indices, dimension d")
    print(f"{'shape':>24} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    rng = np.random.default_rng(0)
    cases = [
        (100, 20, 1),
        (1000, 50, 1),
        (100_000, 50, 1),
        (10_000, 120, 2),
        (50_000, 60, 3),
    ]
    for n, m, d in cases:
        points = rng.uniform(size=(n, d))
        indices = rng.integers(0, 17, size=(m, d)).astype(np.int64)
        t_np = best_of(lambda: _accel.cosine_design_numpy(points, indices), repeats)
        if _accel.cosine_design_numba is None:
            print(f"{f'{n}x{m} d={d}':>24} {t_np * 1e3:>10.3f}ms {'n/a':>12}")
            continue
        t_nb = best_of(lambda: _accel.cosine_design_numba(points, indices), repeats)
        print(
            f"{f'{n}x{m} d={d}':>24} {t_np * 1e3:>10.3f}ms "
            f"{t_nb * 1e3:>10.3f}ms {t_np / t_nb:>8.2f}x"
        )


def bench_features(repeats):
    print("\nrandom cosine features: batch x input_dim -> feature_count")
    print(f"{'shape':>24} {'numpy':>12} {'numba':>12} {'speedup':>9}")
    rng = np.random.default_rng(1)
    cases = [
        (1, 20, 1000),
        (100, 20, 1000),
        (5000, 20, 1000),
        (10_000, 50, 2000),
    ]
    for n, s, feat in cases:
        x = rng.standard_normal((n, s))
        freqs = rng.standard_normal((feat, s))
        phases = rng.uniform(0.0, 2.0 * np.pi, feat)
        scale = np.sqrt(2.0 / feat)
        t_np = best_of(
            lambda: _accel.rks_features_numpy(x, freqs, phases, scale), repeats
        )
        if _accel.rks_features_numba is None:
            print(f"{f'{n}x{s}->{feat}':>24} {t_np * 1e3:>10.3f}ms {'n/a':>12}")
            continue
        t_nb = best_of(
            lambda: _accel.rks_features_numba(x, freqs, phases, scale), repeats
        )
        print(
            f"{f'{n}x{s}->{feat}':>24} {t_np * 1e3:>10.3f}ms "
            f"{t_nb * 1e3:>10.3f}ms {t_np / t_nb:>8.2f}x"
        )


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=7)
    args = parser.parse_args()
    print(f"active backend: {_accel.backend_name()}")
    bench_design(args.repeats)
    bench_features(args.repeats)


if __name__ == "__main__":
    main()
