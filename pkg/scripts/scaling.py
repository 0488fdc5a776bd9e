"""Measure wall-clock time per generation as the population grows.

    python scripts/scaling.py [--sizes 100 200 400 800] [--generations 15]
"""
import argparse
import time

from cmopde.engine import RunConfig, run
from cmopde.problems import get_problem


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--problem", default="convex-cut")
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400, 800])
    ap.add_argument("--generations", type=int, default=15)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    problem = get_problem(args.problem)
    problem.reference_front
    prev = None
    for N in args.sizes:
        best = float("inf")
        for r in range(args.repeats):
            cfg = RunConfig(pop_size=N, max_fe=N * (args.generations + 1),
                            checkpoint_interval=N, seed=r)
            t0 = time.perf_counter()
            run(problem, cfg)
            best = min(best, time.perf_counter() - t0)
        per_gen = best / args.generations
        growth = "" if prev is None else f"  x{per_gen / prev:.2f}"
        print(f"N={N:>5}  {per_gen * 1e3:8.2f} ms/generation{growth}")
        prev = per_gen


if __name__ == "__main__":
    main()
