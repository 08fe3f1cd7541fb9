"""Compare the compiled and numpy backends on the hot loops.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from ewlgame import kernels
from ewlgame.equilibrium import SolverSettings, symmetric_nash
from ewlgame.game_core import PrisonersDilemmaParams
from ewlgame.quantum_engine import DensityPayoff, PhaseProfile


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    A = PrisonersDilemmaParams(1, 2, 4).matrix()
    m = (A.a00, A.a01, A.a10, A.a11)
    grid = np.linspace(0, 1, 2001)
    x = np.random.default_rng(0).uniform(0, 1, 1_000_000)
    y = x[::-1].copy()
    phases = (0.1, 1.4, 0.1, 1.4)
    payoff = DensityPayoff.quantum(0.7, PhaseProfile(0.1, 1.4), A)

    cases = {
        "density_grid_max 2001x2001": lambda b: kernels.density_grid_max(m, -0.5, grid, grid, backend=b),
        "statevector_payoffs 1e6 pairs": lambda b: kernels.statevector_payoffs(0.7, phases, m, x, y, backend=b),
    }
    backends = kernels.available_backends()
    print(f"default backend: {kernels.BACKEND}")
    print(f"{'case':34s}" + "".join(f"{b:>12s}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in cases.items():
        t = {b: best_of(lambda: fn(b), args.repeat) for b in backends}
        row = f"{name:34s}" + "".join(f"{t[b] * 1e3:10.1f}ms" for b in backends)
        if len(backends) > 1:
            row += f"{t['python'] / t['cython']:11.1f}x"
        print(row)
    t = best_of(lambda: symmetric_nash(payoff, SolverSettings()), args.repeat)
    print(f"{'symmetric_nash (default backend)':34s}{t * 1e3:10.1f}ms")


if __name__ == "__main__":
    main()
