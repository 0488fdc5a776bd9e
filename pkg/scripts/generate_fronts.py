"""Regenerate the stored reference fronts of the built-in suite.

    python scripts/generate_fronts.py [--samples 1000000] [--points 1000]

Writes ``<id>.pf`` (objective points) and ``<id>.ps`` (matching decision
vectors) into ``src/cmopde/data``.
"""
import argparse
import time
from pathlib import Path

from cmopde.problems import builtin_suite, sample_reference_front, save_points

DATA = Path(__file__).resolve().parents[1] / "src" / "cmopde" / "data"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=1_000_000)
    ap.add_argument("--points", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=2025)
    ap.add_argument("--problem", action="append")
    args = ap.parse_args()
    for problem in builtin_suite():
        if args.problem and problem.id not in args.problem:
            continue
        t0 = time.perf_counter()
        X, F = sample_reference_front(problem, args.samples, args.points, seed=args.seed)
        header = (f"reference front for {problem.id}: {len(F)} points thinned from "
                  f">= {args.samples} feasible samples (seed {args.seed})")
        save_points(DATA / f"{problem.id}.pf", F, header)
        save_points(DATA / f"{problem.id}.ps", X, header.replace("front", "set"))
        print(f"{problem.id:>12}: {len(F)} points  ({time.perf_counter() - t0:.1f}s)")


if __name__ == "__main__":
    main()
