"""Compare the compiled and numpy half-sweep kernels.

Times full solves on the seeded acceptance suite and single half-sweeps on
larger random instances. Run with ``python3 benchmarks/bench_kernels.py``.
"""

import argparse
import time

import numpy as np

from fdivot import kernels
from fdivot.generators import make_generator
from fdivot.instances import SUITE_SEEDS, random_problem, suite_instance
from fdivot.solver import solve

KEYS = ["kl", "reverse_kl", "jensen_shannon", "hellinger_sq", "alpha:0.5"]


def _best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def suite_time(kernel, key):
    kernels.half_sweep = kernel
    gen = make_generator(key)
    problems = [suite_instance(s) for s in SUITE_SEEDS]
    t0 = time.perf_counter()
    for prob in problems:
        solve(prob, gen)
    return time.perf_counter() - t0


def sweep_time(kernel, key, n, repeat):
    gen = make_generator(key)
    prob = random_problem(0, n, n, lam=0.1)
    g = np.zeros(n)
    f = np.zeros(n)
    return _best(
        lambda: kernel(gen, prob.lam, prob.cost, g, prob.py, f, 1e-12, 200, 1e-9), repeat
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[50, 200, 800])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    compiled = kernels.compiled_half_sweep()
    if compiled is None:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation`")
    python = kernels.python_half_sweep
    original = kernels.half_sweep

    print("suite (100 instances, full solves)")
    print(f"{'generator':<16}{'cython s':>10}{'python s':>10}{'speedup':>9}")
    for key in KEYS:
        c = suite_time(compiled, key)
        p = suite_time(python, key)
        print(f"{key:<16}{c:>10.3f}{p:>10.3f}{p / c:>9.1f}")
    kernels.half_sweep = original

    print("\nsingle half-sweep, n x n, lambda = 0.1")
    print(f"{'generator':<16}{'n':>6}{'cython ms':>11}{'python ms':>11}{'speedup':>9}")
    for key in KEYS:
        for n in args.sizes:
            c = sweep_time(compiled, key, n, args.repeat)
            p = sweep_time(python, key, n, args.repeat)
            print(f"{key:<16}{n:>6}{c * 1e3:>11.3f}{p * 1e3:>11.3f}{p / c:>9.1f}")


if __name__ == "__main__":
    main()
