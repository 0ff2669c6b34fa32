"""Benchmark the hot kernels: compiled (numba) path vs pure-numpy path.

Run: python benchmarks/bench_kernels.py [--rows 200000] [--repeats 20]

Compiles the loop kernels directly so the comparison runs regardless of
the DENDROFIT_DISABLE_NUMBA setting; also cross-checks that both paths
agree numerically.
"""

import argparse
import time

import numpy as np

from dendrofit import kernels


def jit_variants():
    try:
        from numba import njit
    except ImportError:
        return None
    if kernels.USING_NUMBA:
        return {
            "joint_counts": kernels.joint_counts,
            "gaussian_moments": kernels.gaussian_moments,
            "class_stats": kernels.class_stats,
            "mixture_mi": kernels.mixture_mi,
        }
    return {
        "joint_counts": njit(cache=True)(kernels._joint_counts_loop),
        "gaussian_moments": njit(cache=True)(kernels._gaussian_moments_loop),
        "class_stats": njit(cache=True)(kernels._class_stats_loop),
        "mixture_mi": njit(cache=True)(kernels._mixture_mi_loop),
    }


def best_of(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def check_close(a, b):
    if isinstance(a, tuple):
        return all(check_close(u, v) for u, v in zip(a, b))
    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    b = np.atleast_1d(np.asarray(b, dtype=np.float64))
    return np.allclose(a, b, rtol=1e-10, atol=1e-12, equal_nan=True)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--rows", type=int, default=200_000)
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--classes", type=int, default=4)
    parser.add_argument("--quad-order", type=int, default=128)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    n, k = args.rows, args.classes
    xi = rng.integers(0, k, size=n).astype(np.int64)
    xj = rng.integers(0, 3, size=n).astype(np.int64)
    x = rng.standard_normal(n)
    y = 0.6 * x + rng.standard_normal(n)
    probs = rng.dirichlet(np.ones(k))
    means = rng.uniform(-4, 4, size=k)
    nodes, weights = np.polynomial.hermite.hermgauss(args.quad_order)

    workloads = {
        "joint_counts": (kernels.joint_counts_numpy, (xi, xj, k, 3)),
        "gaussian_moments": (kernels.gaussian_moments_numpy, (x, y)),
        "class_stats": (kernels.class_stats_numpy, (x, xi, k)),
        "mixture_mi": (kernels.mixture_mi_numpy, (probs, means, 1.0, nodes, weights)),
    }

    jitted = jit_variants()
    if jitted is None:
        print("numba unavailable: timing the numpy path only")
    else:
        for name, fn in jitted.items():  # compile outside the timed region
            fn(*workloads[name][1])

    print(f"rows={n} classes={k} quad_order={args.quad_order} repeats={args.repeats}")
    header = f"{'kernel':<18} {'numpy (ms)':>12} {'numba (ms)':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, (numpy_fn, work) in workloads.items():
        t_np = best_of(numpy_fn, work, args.repeats) * 1e3
        if jitted is None:
            print(f"{name:<18} {t_np:>12.3f} {'-':>12} {'-':>9}")
            continue
        t_nb = best_of(jitted[name], work, args.repeats) * 1e3
        agree = check_close(numpy_fn(*work), jitted[name](*work))
        flag = "" if agree else "  !! MISMATCH"
        print(f"{name:<18} {t_np:>12.3f} {t_nb:>12.3f} {t_np / t_nb:>8.2f}x{flag}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
