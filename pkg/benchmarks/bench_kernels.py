"""Compare the compiled and pure-numpy kernel backends.

Usage: python benchmarks/bench_kernels.py [--repeats N]

Times the energy and gradient kernels on padded state vectors of
increasing size and prints one table row per size with the speedup.
"""
import argparse
import time

import numpy as np

from plapvar._kernels import pyfallback

try:
    from plapvar._kernels import core
except ImportError:
    core = None


def bench(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(200):
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / 200.0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=7)
    opts = parser.parse_args()

    if core is None:
        print("compiled backend unavailable; nothing to compare")
        return

    rng = np.random.default_rng(0)
    print(f"{'size':>8} {'kernel':>8} {'python':>12} {'cython':>12} {'speedup':>9}")
    for n in (16, 64, 256, 1024, 4096, 16384):
        w = np.zeros(n + 4)
        w[2:-2] = rng.uniform(-2.0, 2.0, size=n)
        V = rng.uniform(0.5, 3.0, size=n)
        p2, p1, q, a = 3.0, 2.5, 2.0, 1.5
        for label, f_py, f_cy in (
            ("energy", pyfallback.energy, core.energy),
            ("grad", pyfallback.grad, core.grad),
        ):
            t_py = bench(f_py, (w, p2, p1, q, a, V), opts.repeats)
            t_cy = bench(f_cy, (w, p2, p1, q, a, V), opts.repeats)
            print(
                f"{n:>8} {label:>8} {t_py * 1e6:>10.1f}us {t_cy * 1e6:>10.1f}us "
                f"{t_py / t_cy:>8.1f}x"
            )


if __name__ == "__main__":
    main()
