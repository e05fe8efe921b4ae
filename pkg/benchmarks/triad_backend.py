"""Benchmark the triad pairwise-marginal kernel: numba JIT vs numpy fallback.

Usage: python3 benchmarks/triad_backend.py [kmax ...]
"""

import sys
import time

import numpy as np

from gevreymhd import triads
from gevreymhd.operators import curl
from gevreymhd.spectral import Grid, random_band


def time_fn(fn, *args, repeats=3):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(kmaxes):
    grid = Grid(32)
    state = random_band(grid, seed=42, kmax=max(kmaxes), amplitude=1.0)
    omega = curl(state.u)
    print(f"{'kmax':>4} {'numpy (s)':>12} {'numba (s)':>12} "
          f"{'speedup':>8} {'max |diff|':>12}")
    for kmax in kmaxes:
        A = triads.extract_band(state.u, kmax, strict=False)
        B = triads.extract_band(state.h, kmax, strict=False)
        C = triads.extract_band(omega, kmax, strict=False)
        t_np, p_np = time_fn(triads._pair_marginal_numpy, A, B, C, kmax, 1)
        if triads.backend() == "numba":
            # warm the JIT before timing
            triads._pair_marginal_numba(A, B, C, kmax, 1)
            t_nb, p_nb = time_fn(triads._pair_marginal_numba, A, B, C, kmax, 1)
            diff = float(np.max(np.abs(p_np - p_nb)))
            print(f"{kmax:>4} {t_np:>12.4f} {t_nb:>12.4f} "
                  f"{t_np / t_nb:>8.1f} {diff:>12.3e}")
        else:
            print(f"{kmax:>4} {t_np:>12.4f} {'n/a':>12} {'n/a':>8} {'n/a':>12}")


if __name__ == "__main__":
    args = [int(a) for a in sys.argv[1:]] or [2, 3, 4, 5, 6]
    main(args)
