"""Time the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeat R]
"""

import argparse
import timeit

import numpy as np

from ppachaos import _kernels_py
from ppachaos.multiindex import enumerate_basis

try:
    from ppachaos import _kernels
except ImportError:
    _kernels = None


def cases():
    rng = np.random.default_rng(0)
    pts = rng.standard_normal((2000, 7))
    idx = enumerate_basis(7, 3).indices
    samples = rng.standard_normal(100_000)
    grid = np.linspace(-5, 5, 512)
    return {
        "design_matrix N=2000 P=120": lambda m: m.design_matrix(pts, idx, 3),
        "gradient_matrix N=2000 P=120": lambda m: m.gradient_matrix(pts, idx, 3, 2),
        "kde_sum n=1e5 grid=512": lambda m: m.kde_sum(samples, grid, 0.1),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not built; only the fallback is timed")
    print(f"{'kernel':32s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, fn in cases().items():
        t_py = min(timeit.repeat(lambda: fn(_kernels_py), number=1, repeat=args.repeat)) * 1e3
        if _kernels is None:
            print(f"{name:32s} {t_py:12.2f} {'-':>12s} {'-':>8s}")
            continue
        t_cy = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:32s} {t_py:12.2f} {t_cy:12.2f} {t_py / t_cy:7.1f}x")


if __name__ == "__main__":
    main()
