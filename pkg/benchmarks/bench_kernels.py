#!/usr/bin/env python3
"""Benchmark the compiled split kernels against the numpy fallback.

Times both the raw scan (the hot inner loop of every tree fit) and a
full boosted-ensemble fit with each backend swapped in.

Usage: python benchmarks/bench_kernels.py [--sizes 100,700,5000]
"""

import argparse
import time

import numpy as np

import extrabench.trees as trees_mod
from extrabench._kernels import _split_py

try:
    from extrabench._kernels import _split as _compiled
except ImportError:
    _compiled = None


def _time(fn, reps):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_scan(sizes, reps=200):
    rng = np.random.default_rng(0)
    print(f"{'n':>6s}  {'python':>10s}  {'compiled':>10s}  {'speedup':>8s}")
    for n in sizes:
        x = np.sort(rng.uniform(0, 1, n))
        y = rng.normal(size=n)
        w = np.ones(n)
        t_py = _time(lambda: _split_py.best_split_sse(x, y, w, 1), reps)
        if _compiled is None:
            print(f"{n:6d}  {t_py * 1e6:8.1f}us  {'n/a':>10s}")
            continue
        t_c = _time(lambda: _compiled.best_split_sse(x, y, w, 1), reps)
        assert _split_py.best_split_sse(x, y, w, 1) == _compiled.best_split_sse(x, y, w, 1)
        print(f"{n:6d}  {t_py * 1e6:8.1f}us  {t_c * 1e6:8.1f}us  {t_py / t_c:7.1f}x")


def bench_gbm(reps=3):
    """Fit a realistic boosted ensemble with each backend patched in."""
    x = np.linspace(0, 1, 700)
    y = np.exp(x * x + x)
    cfg = trees_mod.GbmConfig(
        n_estimators=157, learning_rate=0.2, max_depth=3,
        subsample=0.73, min_child_weight=0.1, objective_order="second", seed=0,
    )
    results = {}
    backends = {"python": _split_py}
    if _compiled is not None:
        backends["compiled"] = _compiled
    original = (trees_mod.best_split_sse, trees_mod.best_split_grad_hess)
    try:
        for name, impl in backends.items():
            trees_mod.best_split_sse = impl.best_split_sse
            trees_mod.best_split_grad_hess = impl.best_split_grad_hess
            results[name] = _time(lambda: trees_mod.fit_gbm(x, y, cfg), reps)
    finally:
        trees_mod.best_split_sse, trees_mod.best_split_grad_hess = original
    print()
    print("second-order GBM fit, 157 rounds on 700 samples:")
    for name, t in results.items():
        print(f"  {name:>8s}: {t:6.3f}s")
    if len(results) == 2:
        print(f"  speedup: {results['python'] / results['compiled']:.2f}x")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", default="100,700,5000")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    if _compiled is None:
        print("compiled kernels not available; timing fallback only")
    bench_scan(sizes)
    bench_gbm()


if __name__ == "__main__":
    main()
