"""Epsilon-dominance and strength/raw/density fitness (minimized)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import cv_array, objectives_matrix


def relaxed_cv(cv, eps: float):
    """Violation with everything at or below ``eps`` treated as zero."""
    if np.ndim(cv) == 0:
        return 0.0 if cv <= eps else float(cv)
    cv = np.asarray(cv, dtype=float)
    return np.where(cv <= eps, 0.0, cv)


def pareto_dominates(fa, fb) -> bool:
    fa = np.asarray(fa)
    fb = np.asarray(fb)
    return bool(np.all(fa <= fb) and np.any(fa < fb))


def eps_dominates(a, b, eps: float) -> bool:
    ra, rb = relaxed_cv(a.cv, eps), relaxed_cv(b.cv, eps)
    if ra != rb:
        return ra < rb
    return pareto_dominates(a.f, b.f)


def dominance_matrix(F: np.ndarray, rcv: np.ndarray) -> np.ndarray:
    """``dom[i, j]`` is True when member i epsilon-dominates member j."""
    n, m = F.shape
    le = np.ones((n, n), dtype=bool)
    lt = np.zeros((n, n), dtype=bool)
    for k in range(m):
        a = F[:, None, k]
        b = F[None, :, k]
        le &= a <= b
        lt |= a < b
    same = rcv[:, None] == rcv[None, :]
    return (rcv[:, None] < rcv[None, :]) | (same & le & lt)


def pairwise_distances(F: np.ndarray) -> np.ndarray:
    """Euclidean distance matrix, accumulated objective by objective.

    The fixed summation order keeps ``d[i, j] == d[j, i]`` bit-for-bit, which
    the truncation tie logic relies on.
    """
    n, m = F.shape
    d2 = np.zeros((n, n))
    for k in range(m):
        diff = F[:, None, k] - F[None, :, k]
        d2 += diff * diff
    return np.sqrt(d2)


@dataclass
class FitnessTable:
    relaxed_cv: np.ndarray
    strength: np.ndarray
    raw: np.ndarray
    density: np.ndarray
    fit: np.ndarray
    distances: np.ndarray

    def __len__(self):
        return self.fit.shape[0]

    def ranking(self) -> np.ndarray:
        """Indices sorted by (fit, index)."""
        return np.argsort(self.fit, kind="stable")


def fitness_arrays(F: np.ndarray, cv: np.ndarray, eps: float) -> FitnessTable:
    F = np.asarray(F, dtype=float)
    n = F.shape[0]
    if n < 2:
        raise ValueError("fitness assignment needs at least 2 members")
    rcv = relaxed_cv(np.asarray(cv, dtype=float), eps)
    dom = dominance_matrix(F, rcv)
    strength = dom.sum(axis=1)
    raw = (dom.T.astype(np.int64) @ strength).astype(float)
    dist = pairwise_distances(F)
    k = math.isqrt(n)
    masked = dist.copy()
    np.fill_diagonal(masked, np.inf)
    dk = np.partition(masked, k - 1, axis=1)[:, k - 1]
    density = 1.0 / (dk + 2.0)
    return FitnessTable(rcv, strength, raw, density, raw + density, dist)


def assign_fitness(members, eps: float) -> FitnessTable:
    """Score ``members`` against each other and refresh their fitness caches."""
    table = fitness_arrays(objectives_matrix(members), cv_array(members), eps)
    for ind, v in zip(members, table.fit):
        ind.fitness = float(v)
    return table
