"""Compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]
Prints one line per kernel and size: best time per call for each backend,
the speed-up and the largest difference between the two results.
"""
import argparse
import timeit

import numpy as np

from densimat import kernels


def _cases(rng):
    for n in (64, 128, 256):
        shape = (n, n, 4, 4)
        x = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        left = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        right = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        yield f"sandwich {n}x{n}", lambda c, a=(left, x, right): kernels.sandwich(*a, use_compiled=c)
    for n in (32, 64):
        shape = (4, n, n, n)
        prev, cur, src = (rng.normal(size=shape) for _ in range(3))
        args = (prev, cur, src, 0.1, (0.5, 0.5, 0.5))
        yield f"wave_step {n}^3", lambda c, a=args: kernels.wave_step(*a, use_compiled=c)
    for n in (256, 4096):
        shape = (4, n)
        prev, cur, src = (rng.normal(size=shape) for _ in range(3))
        args = (prev, cur, src, 0.05, (0.1,))
        yield f"wave_step 1-D {n}", lambda c, a=args: kernels.wave_step(*a, use_compiled=c)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if kernels.BACKEND != "cython":
        print("compiled kernels not built; only the numpy fallback is available")
        return
    rng = np.random.default_rng(0)
    print(f"{'kernel':<22}{'cython [ms]':>13}{'numpy [ms]':>13}{'speed-up':>10}{'max diff':>12}")
    for name, fn in _cases(rng):
        tc = min(timeit.repeat(lambda: fn(True), number=1, repeat=args.repeat))
        tn = min(timeit.repeat(lambda: fn(False), number=1, repeat=args.repeat))
        diff = float(np.max(np.abs(fn(True) - fn(False))))
        print(f"{name:<22}{tc * 1e3:>13.3f}{tn * 1e3:>13.3f}{tn / tc:>10.2f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
