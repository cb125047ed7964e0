"""Compare the numba and pure-numpy kernel backends.

Run with ``python3 benchmarks/bench_kernels.py``. Both variants are imported
directly, so the result does not depend on ``KITWPA_DISABLE_NUMBA``. The
first numba call is timed separately as compile time.
"""

import argparse
import math
import time

import numpy as np

from kitwpa import kernels


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def abcd_case(n_points, n_cells):
    rng = np.random.default_rng(0)
    w = np.linspace(1e8, 2e12, n_points)
    l = 100e-12 * rng.uniform(0.5, 3.0, n_cells)
    c = 40e-15 * rng.uniform(0.5, 3.0, n_cells)
    return w, l, c


def ladder_case(n_cells, t_end):
    lind = np.full(n_cells + 1, 100e-12)
    lind[0] = lind[-1] = 50e-12
    cap = np.full(n_cells, 40e-15)
    r0 = math.sqrt(100e-12 / 40e-15)
    w = np.array([2 * math.pi * 8e9, 2 * math.pi * 3e9])
    return (
        lind, cap, 0.3e-3, 1e6, r0, r0, w, np.array([2e-4, 1e-5]), np.zeros(2), 1e-9,
        t_end, 1e-12, 2.5e-12, 1e-8, np.full(2 * n_cells + 1, 1e-14), 10**7,
    )


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--points", type=int, default=20000)
    p.add_argument("--cells", type=int, default=96)
    p.add_argument("--t-end", type=float, default=2e-9)
    a = p.parse_args(argv)

    abcd = abcd_case(a.points, 21)
    ladder = ladder_case(a.cells, a.t_end)
    rows = []
    for name, fast, slow, args in (
        ("supercell_abcd", kernels._supercell_abcd_numba, kernels._supercell_abcd_numpy, abcd),
        ("integrate_ladder", kernels._integrate_ladder_numba, kernels._integrate_ladder_numpy, ladder),
    ):
        compile_s = best_of(lambda: fast(*args), 1)
        t_numba = best_of(lambda: fast(*args), a.repeat)
        t_numpy = best_of(lambda: slow(*args), a.repeat)
        rows.append((name, compile_s, t_numba, t_numpy))
    print(f"{'kernel':<18}{'first call s':>14}{'numba s':>12}{'numpy s':>12}{'speedup':>10}")
    for name, c, tn, tp in rows:
        print(f"{name:<18}{c:>14.3f}{tn:>12.4f}{tp:>12.4f}{tp / tn:>10.1f}")


if __name__ == "__main__":
    main()
