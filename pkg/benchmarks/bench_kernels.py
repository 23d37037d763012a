"""Benchmark the numba kernels against their pure-numpy fallbacks.

Run:  python benchmarks/bench_kernels.py [--repeat N]

The same kernels back the adaptive Nyquist sampler, the encirclement
counter, and the boundary-sample determinant scans, so these micro
timings track the package's hot paths directly.
"""

import argparse
import time

import numpy as np

from cyclostab import _kernels


def time_call(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    cases = []

    num = rng.normal(size=4)
    den = np.array([1.0, 2.0, 2.0, 1.0])
    omegas = np.linspace(-2000.0, 2000.0, 200_000)
    cases.append(("eval_rational_grid (200k points)",
                  _kernels.eval_rational_grid_np,
                  _kernels.eval_rational_grid_nb,
                  (num, den, 0.7, omegas)))

    theta = np.linspace(0, 2 * np.pi, 500_000)
    path = np.exp(1j * theta)
    cases.append(("winding_angle_sum (500k points)",
                  _kernels.winding_angle_sum_np,
                  _kernels.winding_angle_sum_nb,
                  (path.real.copy(), path.imag.copy(), 0.1, 0.2)))

    xs = rng.normal(size=(20_000, 4)) + 1j * rng.normal(size=(20_000, 4))
    ys = rng.normal(size=(20_000, 4)) + 1j * rng.normal(size=(20_000, 4))
    cases.append(("batch_absdet (20k samples, n=4)",
                  _kernels.batch_absdet_np,
                  _kernels.batch_absdet_nb,
                  (xs, ys)))

    if not _kernels.HAVE_NUMBA:
        print("numba unavailable: timing the numpy path only")

    print(f"{'kernel':40s} {'numpy':>10s} {'numba':>10s} {'speedup':>9s}")
    for label, fn_np, fn_nb, data in cases:
        t_np = time_call(fn_np, *data, repeat=args.repeat)
        if _kernels.HAVE_NUMBA:
            fn_nb(*data)  # compile outside the timed region
            t_nb = time_call(fn_nb, *data, repeat=args.repeat)
            print(f"{label:40s} {t_np * 1e3:8.2f}ms {t_nb * 1e3:8.2f}ms "
                  f"{t_np / t_nb:8.2f}x")
        else:
            print(f"{label:40s} {t_np * 1e3:8.2f}ms {'-':>10s} {'-':>9s}")


if __name__ == "__main__":
    main()
