"""Time the compiled and numpy RK4 kernels on the same delayed network.

    python3 benchmarks/bench_kernels.py --n 100 --T 20 --repeat 3
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from pindelay.dde import HistoryFunction, simulate
from pindelay.graph import PinningProblem, erdos_renyi, laplacian, random_pins
from pindelay.kernels import BACKEND


def best_time(problem, history, T, h, backend, repeat):
    times, final = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        final = simulate(problem, history, T, h, backend=backend).samples
        times.append(time.perf_counter() - t0)
    return min(times), final


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--p", type=float, default=0.05)
    ap.add_argument("--T", type=float, default=20.0)
    ap.add_argument("--h", type=float, default=0.0125)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    sys_ = laplacian(erdos_renyi(args.n, args.p, 7))
    pins = random_pins(args.n, max(1, args.n // 10), 7)
    problem = PinningProblem(sys_, pins, 2.0, 0.1, 0.25)
    history = HistoryFunction.random_constant(args.n, 3)
    steps = int(args.T / args.h)

    print(f"n={args.n}, steps={steps}, best of {args.repeat}")
    t_py, y_py = best_time(problem, history, args.T, args.h, "python", args.repeat)
    print(f"python  {t_py:9.4f} s  {steps * args.n / t_py:12.0f} node-steps/s")
    if BACKEND != "cython":
        print("cython  not built (install with a C compiler and Cython to enable)")
        return 0
    t_cy, y_cy = best_time(problem, history, args.T, args.h, "cython", args.repeat)
    print(f"cython  {t_cy:9.4f} s  {steps * args.n / t_cy:12.0f} node-steps/s")
    print(f"speedup {t_py / t_cy:.1f}x, max abs difference {np.max(np.abs(y_py - y_cy)):.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
