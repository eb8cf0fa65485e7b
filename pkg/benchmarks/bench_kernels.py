"""Benchmark the jitted kernels against their pure-numpy twins.

Run from the repository root:

    python3 benchmarks/bench_kernels.py

With KICKEDTOP_NO_NUMBA=1 both columns time the same plain-Python path, which
is useful as a sanity check of the flag itself.
"""
import time

import numpy as np

from kickedtop import _kernels


def best_of(fn, repeats=5):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    rng = np.random.default_rng(0)

    seeds = rng.normal(size=(512, 3))
    seeds /= np.linalg.norm(seeds, axis=1, keepdims=True)

    newton_seeds = rng.normal(size=(2048, 3))
    newton_seeds /= np.linalg.norm(newton_seeds, axis=1, keepdims=True)

    tn = rng.normal(size=400) + 1j * rng.normal(size=400)
    grid = np.linspace(-np.pi, np.pi, 4096, endpoint=False)

    cases = [
        (
            "orbit_mean_x (512 orbits x 2000 steps)",
            lambda: _kernels.orbit_mean_x(seeds, 0.2, 0.1, 2000),
            lambda: _kernels.orbit_mean_x_py(seeds, 0.2, 0.1, 2000),
        ),
        (
            "newton_refine (2048 seeds)",
            lambda: _kernels.newton_refine(newton_seeds, 0.2, 0.1, 1e-12, 60),
            lambda: _kernels.newton_refine_py(newton_seeds, 0.2, 0.1, 1e-12, 60),
        ),
        (
            "trace_series_rho (400 traces x 4096 grid)",
            lambda: _kernels.trace_series_rho(tn, grid, 0.02, 1.0, 81.0),
            lambda: _kernels.trace_series_rho_py(tn, grid, 0.02, 1.0, 81.0),
        ),
    ]

    print(f"numba active: {_kernels.USING_NUMBA}")
    for name, fast, plain in cases:
        fast()  # compile outside the timed region
        t_fast = best_of(fast)
        t_plain = best_of(plain)
        print(
            f"{name:45s} jit {t_fast * 1e3:9.3f} ms   fallback {t_plain * 1e3:9.3f} ms   "
            f"speedup x{t_plain / t_fast:.1f}"
        )


if __name__ == "__main__":
    main()
