"""Time the compiled RK4 kernel against the pure-Python fallback.

    python3 benchmarks/bench_kernel.py [--steps N] [--repeat R]

Both kernels integrate the same closed loop (the sector plant with the
z^2 sin z gain) and the script reports steps/second, the speedup and the
largest difference between the two trajectories.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from nlpi import _backend, _pykernel


def _args(n_steps: int):
    out = np.empty((n_steps + 2, 3))
    poly = np.array([0.0, 0.0, 1.0])
    # perturbed, f = (3 + 3 sin^2 x) x, b = 1, M = 10, nonlinear PI with lam = 2.5
    return (True, 3.0, 3.0, 1.0, 10.0, False, 2.5, poly, True,
            4.0, 4.0, 0.0, 1e-3, n_steps, 1, 1e6, out)


def best_time(fn, n_steps: int, repeat: int):
    best = float("inf")
    for _ in range(repeat):
        args = _args(n_steps)
        start = time.perf_counter()
        rows, _, reason = fn(*args)
        best = min(best, time.perf_counter() - start)
    return best, args[-1][:rows].copy(), reason


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--steps", type=int, default=20_000)
    p.add_argument("--repeat", type=int, default=3)
    a = p.parse_args(argv)

    compiled, kind = _backend.load(prefer_compiled=True)
    t_py, traj_py, _ = best_time(_pykernel.integrate, a.steps, a.repeat)
    print(f"python    {a.steps / t_py:14,.0f} steps/s  ({t_py * 1e3:.1f} ms)")
    if kind != "compiled":
        print("compiled  not built (install with Cython available)")
        return 0
    t_c, traj_c, _ = best_time(compiled, a.steps, a.repeat)
    diff = float(np.max(np.abs(traj_c - traj_py) / (1.0 + np.abs(traj_py))))
    print(f"compiled  {a.steps / t_c:14,.0f} steps/s  ({t_c * 1e3:.1f} ms)")
    print(f"speedup   {t_py / t_c:.1f}x")
    print(f"max relative trajectory difference {diff:.3g}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
