"""Compare the numba kernels against the pure-numpy fallback.

Times the two hot paths: dense simplex solves and exhaustive partition
search.  Run from the repository root:

    python3 benchmarks/bench_backends.py --repeats 5
"""

import argparse
import time

import numpy as np

from setinfo import Experiment, set_backend, variational_bruteforce
from setinfo._backend import HAVE_NUMBA
from setinfo.simplex import solve_max


def simplex_batch(rng, count, m, d):
    problems = []
    for _ in range(count):
        A = np.vstack([rng.standard_normal((m, d)), np.eye(d), -np.eye(d)])
        b = np.concatenate([rng.uniform(0.5, 2.0, size=m), np.full(2 * d, 8.0)])
        problems.append((rng.standard_normal(d), A, b))
    return problems


def time_simplex(problems, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for c, A, b in problems:
            solve_max(c, A, b)
        best = min(best, time.perf_counter() - t0)
    return best


def time_bruteforce(experiments, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for e in experiments:
            variational_bruteforce(e)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--lp-count", type=int, default=200)
    ap.add_argument("--lp-size", type=int, nargs=2, default=(40, 12),
                    metavar=("ROWS", "COLS"))
    ap.add_argument("--bf-shape", type=int, nargs=2, default=(3, 10),
                    metavar=("N", "M"))
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    problems = simplex_batch(rng, args.lp_count, *args.lp_size)
    n, m = args.bf_shape
    experiments = [Experiment(rng.dirichlet(np.ones(m), size=n))
                   for _ in range(20)]

    backends = ["numpy", "numba"] if HAVE_NUMBA else ["numpy"]
    if not HAVE_NUMBA:
        print("numba not importable; timing the numpy path only")

    rows = []
    for backend in backends:
        set_backend(backend)
        # one untimed pass so jit compilation does not pollute the numbers
        time_simplex(problems[:2], 1)
        time_bruteforce(experiments[:1], 1)
        lp = time_simplex(problems, args.repeats)
        bf = time_bruteforce(experiments, args.repeats)
        rows.append((backend, lp, bf))

    print(f"{'backend':<8} {'simplex':>12} {'bruteforce':>12}")
    for backend, lp, bf in rows:
        print(f"{backend:<8} {lp:>11.4f}s {bf:>11.4f}s")
    if len(rows) == 2:
        print(f"{'speedup':<8} {rows[0][1] / rows[1][1]:>11.2f}x "
              f"{rows[0][2] / rows[1][2]:>11.2f}x")


if __name__ == "__main__":
    main()
