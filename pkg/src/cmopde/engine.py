"""Main optimization loop and checkpoint traces.

Evaluations are performed one at a time so the FE counter can cross a
checkpoint boundary in the middle of a generation. A checkpoint that falls
inside a generation records the current (pre-selection) population; one that
coincides with the last evaluation of a generation is recorded after
selection.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import Individual, RandomStream
from .epsilon import epsilon_at, init_schedule
from .fitness import assign_fitness
from .metrics import igd
from .problems import DEFAULT_EQ_TOL, ProblemDefinition, aggregate_cv, evaluate, nondominated_mask
from .selection import environmental_select
from .variation import VariationConfig, make_offspring

TRACE_HEADER = ("fe", "igd", "min_cv", "feasible_count")


@dataclass(frozen=True)
class RunConfig:
    pop_size: int = 100
    max_fe: int = 200_000
    checkpoint_interval: int = 200
    seed: int = 0
    stream_key: tuple[int, ...] = ()
    eq_tol: float = DEFAULT_EQ_TOL

    def validate(self) -> None:
        if self.pop_size < 4:
            raise ValueError("pop_size must be at least 4")
        if self.checkpoint_interval < 1 or self.max_fe < 1:
            raise ValueError("max_fe and checkpoint_interval must be positive")
        if self.max_fe % self.checkpoint_interval:
            raise ValueError("max_fe must be a multiple of checkpoint_interval")
        if self.max_fe < self.pop_size:
            raise ValueError("max_fe must cover at least the initial population")
        if self.eq_tol < 0:
            raise ValueError("eq_tol must be non-negative")


@dataclass
class RunTrace:
    fe: list[int] = field(default_factory=list)
    igd: list[float] = field(default_factory=list)
    min_cv: list[float] = field(default_factory=list)
    feasible_count: list[int] = field(default_factory=list)
    final_population: list[Individual] = field(default_factory=list)
    evaluations: int = 0

    def __len__(self):
        return len(self.fe)

    @property
    def checkpoints(self):
        return list(zip(self.fe, self.igd, self.min_cv, self.feasible_count))

    def record(self, fe, state):
        self.fe.append(int(fe))
        self.igd.append(state[0])
        self.min_cv.append(state[1])
        self.feasible_count.append(state[2])

    @property
    def final_igd(self) -> float:
        return self.igd[-1]

    @property
    def final_cv(self) -> float:
        return self.min_cv[-1]


def population_igd_state(population, reference_front) -> tuple[float, float, int]:
    """(IGD of the feasible nondominated subset or inf, min CV, feasible count)."""
    cv = np.array([ind.cv for ind in population])
    feasible = [ind for ind in population if ind.cv == 0.0]
    min_cv = float(cv.min()) if cv.size else math.inf
    if not feasible:
        return math.inf, min_cv, 0
    F = np.array([ind.f for ind in feasible])
    F = F[nondominated_mask(F)]
    return igd(F, reference_front), min_cv, len(feasible)


def evaluate_individual(problem, ind: Individual, eq_tol: float) -> Individual:
    f, g, h = evaluate(problem, ind.x)
    ind.f = f
    ind.cv = aggregate_cv(g, h, eq_tol)
    return ind


def run(problem: ProblemDefinition, config: RunConfig,
        variation: VariationConfig = VariationConfig(), reference_front=None) -> RunTrace:
    config.validate()
    front = problem.reference_front if reference_front is None else np.asarray(reference_front)
    stream = RandomStream(config.seed, config.stream_key)
    N, max_fe, interval = config.pop_size, config.max_fe, config.checkpoint_interval
    trace = RunTrace()

    fe = 0
    pop: list[Individual] = []
    X0 = stream.uniform_array(problem.bounds.lower, problem.bounds.upper, (N, problem.n_var))
    for x in X0:
        pop.append(evaluate_individual(problem, Individual(x), config.eq_tol))
        fe += 1
        if fe % interval == 0:
            trace.record(fe, population_igd_state(pop, front))
    schedule = init_schedule(pop, max_fe)

    while fe < max_fe:
        eps = epsilon_at(schedule, fe)
        table = assign_fitness(pop, eps)
        offspring = make_offspring(pop, table, fe, max_fe, variation, stream, problem.bounds)
        budget = min(N, max_fe - fe)
        for j in range(budget):
            evaluate_individual(problem, offspring[j], config.eq_tol)
            fe += 1
            if fe % interval == 0 and j < budget - 1:
                trace.record(fe, population_igd_state(pop, front))
        pop = environmental_select(pop + offspring[:budget], N, eps).survivors
        if fe % interval == 0:
            trace.record(fe, population_igd_state(pop, front))

    trace.final_population = pop
    trace.evaluations = fe
    return trace


def random_search(problem: ProblemDefinition, max_fe: int, seed: int = 0,
                  eq_tol: float = DEFAULT_EQ_TOL, reference_front=None) -> float:
    """IGD of the feasible nondominated subset of ``max_fe`` uniform box samples.

    Used as a floor that any working solver should beat by a wide margin.
    Returns ``inf`` when no sample is feasible, matching the trace convention.
    """
    front = problem.reference_front if reference_front is None else np.asarray(reference_front)
    stream = RandomStream(seed, (0x5EA,))
    X = stream.uniform_array(problem.bounds.lower, problem.bounds.upper, (max_fe, problem.n_var))
    feasible = []
    for x in X:
        f, g, h = evaluate(problem, x)
        if aggregate_cv(g, h, eq_tol) == 0.0:
            feasible.append(f)
    if not feasible:
        return math.inf
    F = np.array(feasible)
    return igd(F[nondominated_mask(F)], front)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return repr(v)


def write_trace_csv(path, trace: RunTrace) -> None:
    with Path(path).open("w", newline="") as fh:
        fh.write(",".join(TRACE_HEADER) + "\n")
        for row in trace.checkpoints:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


class TraceFormatError(ValueError):
    pass


def read_trace_csv(path) -> RunTrace:
    path = Path(path)
    trace = RunTrace()
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != TRACE_HEADER:
            raise TraceFormatError(f"{path}:1: expected header {','.join(TRACE_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                if len(row) != 4:
                    raise ValueError(f"expected 4 fields, found {len(row)}")
                trace.fe.append(int(row[0]))
                trace.igd.append(float(row[1]))
                trace.min_cv.append(float(row[2]))
                trace.feasible_count.append(int(row[3]))
            except ValueError as exc:
                raise TraceFormatError(f"{path}:{lineno}: {exc}") from None
    if not trace.fe:
        raise TraceFormatError(f"{path}: no checkpoints")
    return trace


def write_population_csv(path, population, n_var: int, n_obj: int) -> None:
    cols = [f"x{i + 1}" for i in range(n_var)] + [f"f{i + 1}" for i in range(n_obj)] + ["cv"]
    with Path(path).open("w", newline="") as fh:
        fh.write(",".join(cols) + "\n")
        for ind in population:
            vals = list(ind.x) + list(ind.f) + [ind.cv]
            fh.write(",".join(_fmt(v) for v in vals) + "\n")
