"""Acceptance criteria for the solver, its metrics and the statistics battery.

Each test is one criterion with its own wall-clock budget. A PASS/FAIL line
per criterion is printed in the "acceptance criteria" section of the pytest
summary.
"""
import math
import time
from pathlib import Path

import numpy as np
import pytest

import oracles
from cmopde.cli import ExperimentConfig, cmd_run
from cmopde.engine import RunConfig, random_search, run
from cmopde.epsilon import EPS_MID, epsilon_at, schedule_from_eps0
from cmopde.fitness import fitness_arrays, pairwise_distances
from cmopde.metrics import TargetSpec, igd, time_to_target
from cmopde.problems import builtin_suite, get_problem
from cmopde.selection import select_indices
from cmopde.stats import friedman

# problems whose feasible region has a nonempty interior
INTERIOR_FEASIBLE = ("box-sphere", "convex-cut", "sine-gap", "ball-zdt")


def test_epsilon_midpoint(criterion):
    c = criterion("epsilon schedule midpoint/end/monotone", 1.0)
    max_fe = 200_000
    worst = 0.0
    rng = np.random.default_rng(7)
    fes = np.unique(np.concatenate([[0, max_fe], rng.integers(0, max_fe + 1, 10_000)]))
    for eps0 in (0.5, 1.0, 10.0, 1000.0):
        s = schedule_from_eps0(eps0, max_fe)
        rel = abs(epsilon_at(s, max_fe // 2) - EPS_MID) / EPS_MID
        worst = max(worst, rel)
        assert rel < 1e-9
        assert epsilon_at(s, max_fe) == 0.0
        values = np.array([epsilon_at(s, int(fe)) for fe in fes])
        assert np.all(np.diff(values) <= 0.0)
    c.note(f"max relative error {worst:.1e}")
    c.check_runtime()


def _random_population(rng, n, m):
    if rng.random() < 0.3:
        F = rng.integers(0, 4, size=(n, m)).astype(float)  # force ties and duplicates
    else:
        F = rng.random((n, m))
    cv = np.where(rng.random(n) < 0.5, 0.0, rng.random(n))
    eps = float(rng.choice([0.0, rng.random() * 0.5, 1.0]))
    return F, cv, eps


def test_fitness_matches_oracle(criterion):
    c = criterion("fitness vs naive oracle (500 populations)", 10.0)
    rng = np.random.default_rng(11)
    for _ in range(500):
        n = int(rng.integers(2, 31))
        m = int(rng.integers(2, 4))
        F, cv, eps = _random_population(rng, n, m)
        table = fitness_arrays(F, cv, eps)
        S, R, D, fit = oracles.fitness(F.tolist(), cv.tolist(), eps)
        assert table.strength.tolist() == S
        assert table.raw.tolist() == R
        assert table.density.tolist() == D
        assert table.fit.tolist() == fit
    c.note("exact match")
    c.check_runtime()


def test_igd_matches_oracle(criterion):
    c = criterion("IGD vs naive oracle (500 pairs)", 5.0)
    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(500):
        m = int(rng.integers(2, 4))
        P = rng.random((int(rng.integers(1, 40)), m)) * 3.0
        Q = rng.random((int(rng.integers(1, 40)), m)) * 3.0
        err = abs(igd(P, Q) - oracles.igd(P.tolist(), Q.tolist()))
        worst = max(worst, err)
        assert err <= 1e-12
        assert igd(Q, Q) == 0.0
    c.note(f"max abs error {worst:.1e}")
    c.check_runtime()


# Per-problem rank matrices (15 problems x 6 algorithms, midranks for ties)
# whose column means round to the published average-rank rows.
RANKS_Q = [
    [3, 6, 5, 2, 5, 6], [1, 5, 3, 4, 4, 6], [2, 3, 1, 4, 4, 5], [1, 2, 2, 1, 2, 5],
    [5, 5, 4, 4, 5, 6], [1, 2, 3, 4, 2, 5], [2, 4, 5, 3, 5, 6], [2, 5, 5, 3, 5, 6],
    [3, 3, 6, 4, 5, 6], [5, 1, 6, 5, 5, 6], [1, 2, 5, 2, 4, 6], [1, 5, 3, 1, 5, 6],
    [3, 4, 5, 1, 2, 6], [1, 5, 3, 2, 5, 6], [3, 2, 6, 5, 5, 6],
]
RANKS_TTT = [
    [3, 6, 5, 3, 5, 6], [1, 4, 2, 1, 2, 6], [1, 2, 2, 4, 5, 5], [1, 2, 6, 1, 1, 6],
    [2, 5, 3, 1, 5, 5], [1, 2, 4, 2, 2, 3], [1, 2, 3, 4, 5, 5], [1, 2, 3, 2, 5, 6],
    [1, 2, 6, 4, 5, 5], [1, 2, 6, 4, 4, 6], [1, 4, 6, 2, 5, 4], [1, 5, 4, 4, 6, 6],
    [5, 5, 5, 2, 1, 4], [6, 5, 2, 4, 5, 5], [1, 3, 6, 4, 5, 6],
]


def test_friedman_reproduction(criterion):
    c = criterion("Friedman chi2 reproduction", 1.0)
    q = friedman(RANKS_Q)
    t = friedman(RANKS_TTT)
    assert np.round(q.avg_ranks, 2).tolist() == [1.77, 3.33, 3.80, 2.50, 3.73, 5.87]
    assert np.round(t.avg_ranks, 2).tolist() == [1.80, 3.47, 4.17, 2.50, 4.03, 5.03]
    assert q.df == 5 and t.df == 5
    assert abs(q.chi2 - 41.90) <= 0.5
    assert abs(t.chi2 - 29.88) <= 0.5
    c.note(f"Q chi2={q.chi2:.2f}, TTT chi2={t.chi2:.2f}, df=5")
    c.check_runtime()


def test_selection_properties(criterion):
    c = criterion("selection properties (1000 merged sets)", 30.0)
    rng = np.random.default_rng(17)
    oracle_checked = 0
    for trial in range(1000):
        small = trial % 2 == 0
        N = int(rng.integers(2, 7)) if small else int(rng.integers(2, 40))
        n = 2 * N
        m = int(rng.integers(2, 4))
        F, cv, eps = _random_population(rng, n, m)
        table = fitness_arrays(F, cv, eps)
        chosen, _ = select_indices(table.fit, cv, pairwise_distances(F), N, eps)
        chosen = chosen.tolist()
        assert len(chosen) == N and len(set(chosen)) == N
        feasible = set(np.flatnonzero(cv <= eps).tolist())
        if len(feasible) <= N:
            assert feasible <= set(chosen)
        else:
            assert set(chosen) <= feasible
        if n <= 12:
            fit = oracles.fitness(F.tolist(), cv.tolist(), eps)[3]
            assert set(chosen) == oracles.select(F.tolist(), cv.tolist(), fit, N, eps)
            oracle_checked += 1
    c.note(f"{oracle_checked} sets checked against the oracle")
    c.check_runtime()


@pytest.mark.slow
def test_solver_sanity(criterion):
    c = criterion("solver sanity (5 problems x 10 runs, 20k FE)", 120.0)
    summary = []
    for problem in builtin_suite():
        traces = [run(problem, RunConfig(pop_size=100, max_fe=20_000, seed=r))
                  for r in range(10)]
        if problem.id in INTERIOR_FEASIBLE:
            assert all(t.final_cv == 0.0 for t in traces), problem.id
        median = float(np.median([t.final_igd for t in traces]))
        baseline = random_search(problem, 20_000, seed=0)
        ratio = baseline / median
        summary.append(f"{problem.id}:{ratio:.0f}x")
        assert ratio >= 5.0, f"{problem.id}: median {median:.4g} vs baseline {baseline:.4g}"
    c.note("IGD gain over random search " + " ".join(summary))
    c.check_runtime()


def _trace_bytes(out: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))}


def test_determinism(tmp_path, criterion):
    c = criterion("determinism (repeat and parallel)", 60.0)
    base = dict(problems=["convex-cut", "eq-ridge"], runs=3, seed=5, max_fe=3000)
    outs = []
    for name, jobs in (("a", 1), ("b", 1), ("p", 2)):
        cfg = ExperimentConfig(out=str(tmp_path / name), **base)
        assert cmd_run(cfg, jobs=jobs) == 0
        outs.append(_trace_bytes(tmp_path / name))
    assert len(outs[0]) == 12
    assert outs[0] == outs[1]
    assert outs[0] == outs[2]
    c.note(f"{len(outs[0])} files byte-identical across 3 batches")
    c.check_runtime()


@pytest.mark.slow
def test_checkpoint_contract(criterion):
    c = criterion("checkpoint contract", 60.0)
    problem = get_problem("sine-gap")
    full = run(problem, RunConfig(seed=3))
    assert len(full) == 1000
    assert full.fe == list(range(200, 200_001, 200))
    assert full.evaluations == 200_000
    short = run(problem, RunConfig(max_fe=2000, seed=3))
    assert len(short) == 10
    assert time_to_target(full, TargetSpec(problem.id, 0.0)) == 1001
    c.note(f"{len(full)} / {len(short)} checkpoints, unreached TTT=1001")
    c.check_runtime()


def _generation_time(problem, N, generations=15, repeats=3):
    best = math.inf
    for r in range(repeats):
        cfg = RunConfig(pop_size=N, max_fe=N * (generations + 1), checkpoint_interval=N, seed=r)
        t0 = time.perf_counter()
        run(problem, cfg)
        best = min(best, time.perf_counter() - t0)
    return best / generations


def test_complexity_scaling(criterion):
    c = criterion("per-generation time scaling", 120.0)
    problem = get_problem("convex-cut")
    problem.reference_front  # load once outside the timed region
    times = {N: _generation_time(problem, N) for N in (100, 200, 400)}
    ratios = [times[200] / times[100], times[400] / times[200]]
    c.note("per doubling " + ", ".join(f"{r:.2f}x" for r in ratios))
    assert max(ratios) <= 4.5
    c.check_runtime()
