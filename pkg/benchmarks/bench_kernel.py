"""Compare the compiled replication kernel with the numpy fallback.

    python3 benchmarks/bench_kernel.py [--reps 20000] [--repeat 3]

Both backends must return the same exceedance count; the script exits
non-zero if they disagree.
"""

import argparse
import sys
import time

from fwerbound.equicorrelated import TestProblem
from fwerbound.general import CorrelationMatrix
from fwerbound.montecarlo import BACKEND, count_exceedances

CASES = [
    ("equi n=10 rho=0.5", (10, 0.5), TestProblem(10, 0.3)),
    ("equi n=100 rho=0.3", (100, 0.3), TestProblem(100, 0.05)),
    ("equi n=500 rho=0.9", (500, 0.9), TestProblem(500, 0.05)),
    ("matrix n=50 rho=0.4", CorrelationMatrix.equicorrelated(50, 0.4), TestProblem(50, 0.05)),
]


def best_time(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args(argv)
    if BACKEND != "compiled":
        print("compiled kernel not built; only the fallback is available")
        return 1
    print(f"{'case':24} {'compiled s':>11} {'python s':>10} {'speedup':>8}  counts")
    mismatch = False
    for label, model, problem in CASES:
        tc, hc = best_time(lambda: count_exceedances(model, problem.x, args.reps, args.seed, 1, "compiled"),
                           args.repeat)
        tp, hp = best_time(lambda: count_exceedances(model, problem.x, args.reps, args.seed, 1, "python"), 1)
        mismatch |= hc != hp
        print(f"{label:24} {tc:11.4f} {tp:10.4f} {tp / tc:8.1f}  {hc} / {hp}")
    return 1 if mismatch else 0


if __name__ == "__main__":
    sys.exit(main())
