"""Compare solver runs against uniform random search on the built-in suite.

    python scripts/sanity_benchmark.py [--runs 10] [--max-fe 20000] [--pop-size 100]

Prints, per problem, the share of runs ending feasible, the median final IGD,
the random-search IGD at the same budget and their ratio.
"""
import argparse
import time

import numpy as np

from cmopde.engine import RunConfig, random_search, run
from cmopde.problems import builtin_suite


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--max-fe", type=int, default=20_000)
    ap.add_argument("--pop-size", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    print(f"{'problem':>12} {'feasible':>9} {'median IGD':>11} {'random':>9} {'ratio':>7} {'time':>7}")
    for problem in builtin_suite():
        t0 = time.perf_counter()
        traces = [run(problem, RunConfig(args.pop_size, args.max_fe, seed=args.seed + r))
                  for r in range(args.runs)]
        feasible = sum(t.final_cv == 0.0 for t in traces) / args.runs
        median = float(np.median([t.final_igd for t in traces]))
        base = random_search(problem, args.max_fe, seed=args.seed)
        print(f"{problem.id:>12} {feasible:>9.0%} {median:>11.4g} {base:>9.4g} "
              f"{base / median:>6.1f}x {time.perf_counter() - t0:>6.1f}s")


if __name__ == "__main__":
    main()
