"""Offspring generation: current-to-pbest/1 with a fitness-oriented difference.

Per target: draw (F, CR) from fixed pools, pick a p-best parent from the
shrinking top-p window, build the mutant, recombine with an optional Cauchy
perturbation of the non-recombined components, and clip to the box.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Bounds, Individual, RandomStream, clip, decisions_matrix
from .fitness import FitnessTable


@dataclass(frozen=True)
class VariationConfig:
    f_pool: tuple[float, ...] = (0.6, 0.8, 1.0)
    cr_pool: tuple[float, ...] = (0.1, 0.2, 1.0)
    cauchy_prob: float = 0.2
    cauchy_scale: float = 0.1

    def __post_init__(self):
        if not 0.0 <= self.cauchy_prob <= 1.0:
            raise ValueError("cauchy_prob must lie in [0, 1]")
        if not self.f_pool or not self.cr_pool:
            raise ValueError("parameter pools must be non-empty")


def pbest_window(fe: int, max_fe: int, n: int) -> int:
    return max(2, math.floor(n * (1.0 - 0.99 * fe / max_fe)))


def _fit_values(fitness) -> np.ndarray:
    if isinstance(fitness, FitnessTable):
        return fitness.fit
    return np.asarray(fitness, dtype=float)


def select_parents(target: int, ranking: np.ndarray, p: int, n: int,
                   stream: RandomStream) -> tuple[int, int, int]:
    """Draw (pbest, r1, r2), pairwise distinct and distinct from ``target``."""
    if n < 4:
        raise ValueError(f"need at least 4 members to pick distinct parents, got {n}")
    top = ranking[:p]
    pbest = int(top[stream.integer(len(top))])
    while pbest == target:
        pbest = int(top[stream.integer(len(top))])
    r1 = stream.integer(n)
    while r1 == target or r1 == pbest:
        r1 = stream.integer(n)
    r2 = stream.integer(n)
    while r2 == target or r2 == pbest or r2 == r1:
        r2 = stream.integer(n)
    return pbest, r1, r2


def mutant(x, x_pbest, x_r1, x_r2, F: float, fit_r1: float, fit_r2: float) -> np.ndarray:
    """``x + F (x_pbest - x) + F2 (x_r1 - x_r2)``, F2 = F if fit_r1 <= fit_r2 else -F."""
    F2 = F if fit_r1 <= fit_r2 else -F
    return x + F * (x_pbest - x) + F2 * (x_r1 - x_r2)


def mutate(target_index: int, population, fitness, p: int, F: float,
           stream: RandomStream, ranking: np.ndarray | None = None) -> np.ndarray:
    """Unclipped current-to-pbest/1 mutant for ``population[target_index]``.

    ``population`` is a decision matrix or a list of individuals; ``fitness`` a
    :class:`FitnessTable` or per-member fitness values.
    """
    X = population if isinstance(population, np.ndarray) else decisions_matrix(population)
    fit = _fit_values(fitness)
    n = X.shape[0]
    if ranking is None:
        ranking = np.argsort(fit, kind="stable")
    pbest, r1, r2 = select_parents(target_index, ranking, min(p, n), n, stream)
    return mutant(X[target_index], X[pbest], X[r1], X[r2], F, fit[r1], fit[r2])


def crossover(x, v, CR: float, stream: RandomStream, cauchy_prob: float = 0.2,
              cauchy_scale: float = 0.1) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if x.shape != v.shape:
        raise ValueError(f"crossover: shape mismatch {x.shape} vs {v.shape}")
    perturb = stream.bernoulli(cauchy_prob)
    take_v = stream.random(x.shape[0]) < CR
    if perturb:
        other = stream.cauchy(x, cauchy_scale)
    else:
        other = x
    return np.where(take_v, v, other)


def make_offspring(population, fitness, fe: int, max_fe: int, config: VariationConfig,
                   stream: RandomStream, bounds: Bounds) -> list[Individual]:
    """One clipped, unevaluated offspring per target."""
    X = decisions_matrix(population)
    fit = _fit_values(fitness)
    n = X.shape[0]
    p = pbest_window(fe, max_fe, n)
    ranking = np.argsort(fit, kind="stable")
    offspring = []
    for i in range(n):
        F = stream.choice(config.f_pool)
        CR = stream.choice(config.cr_pool)
        pbest, r1, r2 = select_parents(i, ranking, min(p, n), n, stream)
        v = mutant(X[i], X[pbest], X[r1], X[r2], F, fit[r1], fit[r2])
        u = crossover(X[i], v, CR, stream, config.cauchy_prob, config.cauchy_scale)
        offspring.append(Individual(clip(u, bounds)))
    return offspring
