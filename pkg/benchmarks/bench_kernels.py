#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure NumPy fallback.

Usage:  python benchmarks/bench_kernels.py [--repeat 2000]

Times the hot operations on representative inputs (4x4 complex systems,
degree-7 polynomials, a 7x7 Sylvester determinant) plus one end-to-end
eigensystem assembly, and prints the speedup per kernel.
"""

import argparse
import time

import numpy as np

from epkit._core import pure

try:
    from epkit._core import _speedups
except ImportError:
    _speedups = None


def _time(fn, args_list, repeat):
    t0 = time.perf_counter()
    for _ in range(repeat):
        for args in args_list:
            fn(*args)
    return (time.perf_counter() - t0) / (repeat * len(args_list))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=500)
    args = ap.parse_args()

    rng = np.random.default_rng(7)
    mats4 = [
        rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)) for _ in range(8)
    ]
    mats7 = [
        rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7)) for _ in range(4)
    ]
    polys = [
        np.append(rng.normal(size=7) + 1j * rng.normal(size=7), 1.0)
        for _ in range(8)
    ]
    vecs = [rng.normal(size=4) + 1j * rng.normal(size=4) for _ in range(8)]

    cases = [
        ("determinant 4x4", "determinant", [(m,) for m in mats4]),
        ("determinant 7x7", "determinant", [(m,) for m in mats7]),
        ("char_poly 4x4", "char_poly", [(m,) for m in mats4]),
        ("poly_roots deg 7", "poly_roots", [(p,) for p in polys]),
        ("null_vector 4x4", "null_vector", [(m,) for m in mats4]),
        ("solve 4x4", "solve", [(m, v) for m, v in zip(mats4, vecs)]),
    ]

    print(f"{'kernel':<20} {'pure':>12} {'compiled':>12} {'speedup':>9}")
    for label, name, inputs in cases:
        t_pure = _time(getattr(pure, name), inputs, args.repeat)
        if _speedups is None:
            print(f"{label:<20} {t_pure * 1e6:>10.1f}us {'n/a':>12} {'':>9}")
            continue
        t_fast = _time(getattr(_speedups, name), inputs, args.repeat)
        print(
            f"{label:<20} {t_pure * 1e6:>10.1f}us {t_fast * 1e6:>10.1f}us "
            f"{t_pure / t_fast:>8.1f}x"
        )

    if _speedups is None:
        print("\ncompiled extension not built; showing pure timings only")


if __name__ == "__main__":
    main()
