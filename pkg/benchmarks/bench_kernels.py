#!/usr/bin/env python3
"""Time the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--sizes 1024 16384 262144] [--repeats 200]

Also times one representative solver-level workload (a short remainder
solve) under each backend; run with NLS1D_PURE_PYTHON=1 to force the
fallback for the whole process instead.
"""

import argparse
import time

import numpy as np

from nls1d.kernels import _fallback

try:
    from nls1d.kernels import _compiled
except ImportError:
    _compiled = None


def timeit(fn, repeats):
    fn()  # warm up
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def bench_pointwise(sizes, repeats):
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16} {'size':>8} {'numpy (us)':>12} {'cython (us)':>12} {'speedup':>8}")
    for n in sizes:
        u = np.ascontiguousarray(rng.standard_normal(n) + 1j * rng.standard_normal(n))
        v = np.ascontiguousarray(rng.standard_normal(n) + 1j * rng.standard_normal(n))
        acc = np.zeros(n, dtype=np.complex128)
        phase = np.ascontiguousarray(np.exp(1j * rng.standard_normal(n)))
        cases = {
            "abs2": lambda impl: impl.abs2(u),
            "cubic": lambda impl: impl.cubic(u),
            "nonlinear_phase": lambda impl: impl.nonlinear_phase(u, 1e-3),
            "duhamel_step": lambda impl: impl.duhamel_step(acc, u, v, phase, 5e-4),
        }
        for name, call in cases.items():
            t_py = timeit(lambda: call(_fallback), repeats)
            if _compiled is None:
                print(f"{name:<16} {n:>8} {t_py * 1e6:>12.2f} {'n/a':>12} {'n/a':>8}")
                continue
            t_cy = timeit(lambda: call(_compiled), repeats)
            print(f"{name:<16} {n:>8} {t_py * 1e6:>12.2f} {t_cy * 1e6:>12.2f} "
                  f"{t_py / t_cy:>8.2f}")


def bench_solve(repeats):
    from nls1d import kernels
    from nls1d.grid import Grid, GridFunction, SobolevSpec
    from nls1d.picard import SolverConfig, TimeGrid, rescale_to_smallness, solve_nls

    g = Grid(-16.0, 32.0 / 256, 256, "periodic")
    u0, _ = rescale_to_smallness(GridFunction(g, np.exp(-g.x ** 2)),
                                 SobolevSpec(3, 6.0), 0.2)
    tg = TimeGrid(0.0, 2e-3, 250)

    def run():
        solve_nls(u0, 1, tg, SolverConfig(tol=1e-10, max_iter=60))

    t = timeit(run, max(1, repeats // 50))
    which = "cython" if kernels.USING_COMPILED else "numpy fallback"
    print(f"\nremainder solve (256 pts x 251 nodes) with {which} kernels: {t * 1e3:.1f} ms")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[1024, 16384, 262144])
    ap.add_argument("--repeats", type=int, default=200)
    args = ap.parse_args()
    if _compiled is None:
        print("compiled extension not importable; timing fallback only\n")
    bench_pointwise(args.sizes, args.repeats)
    bench_solve(args.repeats)


if __name__ == "__main__":
    main()
