"""Feasibility-first environmental selection with nearest-neighbour truncation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Individual, objectives_matrix
from .fitness import FitnessTable, assign_fitness, pairwise_distances


@dataclass
class SelectionOutcome:
    survivors: list[Individual]
    indices: np.ndarray
    feasible_kept: int
    infeasible_kept: int


def truncate_indices(dist: np.ndarray, target_size: int) -> np.ndarray:
    """Shrink a set to ``target_size`` by repeatedly dropping its most crowded member.

    The most crowded member is the one whose ascending distance-to-others
    vector is lexicographically smallest; full ties go to the lowest index.
    Returns the surviving indices in ascending order.
    """
    n = dist.shape[0]
    if target_size < 2:
        raise ValueError("truncation target must be at least 2")
    if n <= target_size:
        return np.arange(n)
    D = np.array(dist, dtype=float, copy=True)
    np.fill_diagonal(D, np.inf)
    alive = np.ones(n, dtype=bool)
    nn = D.min(axis=1)
    count = n
    while count > target_size:
        idx = np.flatnonzero(alive)
        m = nn[idx].min()
        cands = idx[nn[idx] == m]
        if cands.size == 1:
            victim = int(cands[0])
        else:
            rows = np.sort(D[np.ix_(cands, idx)], axis=1)
            # lexsort's last key is primary and it is stable, so full ties keep the lowest index
            victim = int(cands[np.lexsort(rows.T[::-1])[0]])
        old = D[:, victim].copy()
        alive[victim] = False
        D[:, victim] = np.inf
        D[victim, :] = np.inf
        nn[victim] = np.inf
        stale = alive & (old == nn)
        if stale.any():
            nn[stale] = D[stale].min(axis=1)
        count -= 1
    return np.flatnonzero(alive)


def truncate(members: list[Individual], target_size: int) -> list[Individual]:
    if target_size < 2:
        raise ValueError("truncation target must be at least 2")
    if len(members) <= target_size:
        return list(members)
    keep = truncate_indices(pairwise_distances(objectives_matrix(members)), target_size)
    return [members[i] for i in keep]


def select_indices(fit: np.ndarray, cv: np.ndarray, dist: np.ndarray, N: int,
                   eps: float) -> tuple[np.ndarray, int]:
    """Array-level selection core; returns (survivor indices, feasible count kept)."""
    n = fit.shape[0]
    if n < N:
        raise ValueError(f"cannot select {N} survivors from {n} candidates")
    order = np.argsort(fit, kind="stable")
    feasible_mask = cv <= eps
    feasible = order[feasible_mask[order]]
    infeasible = order[~feasible_mask[order]]
    nf = feasible.size
    if nf > N:
        nd = np.sort(feasible[fit[feasible] < 1.0])
        if nd.size > N:
            keep = truncate_indices(dist[np.ix_(nd, nd)], N)
            chosen = nd[keep]
        else:
            rest = feasible[fit[feasible] >= 1.0]
            chosen = np.concatenate([nd, rest[: N - nd.size]])
        return chosen, N
    chosen = np.concatenate([feasible, infeasible[: N - nf]])
    return chosen, nf


def environmental_select(merged: list[Individual], N: int, eps: float,
                         table: FitnessTable | None = None) -> SelectionOutcome:
    """Pick ``N`` survivors from ``merged``.

    Fitness is computed once over the whole merged set (pass ``table`` to reuse
    an existing one). With more than ``N`` epsilon-feasible candidates the
    choice is made among them only: nondominated first (fit < 1), truncated if
    oversized, otherwise topped up by fitness. Otherwise every feasible
    candidate survives and the best-fit infeasible ones fill the rest.
    """
    if len(merged) < N:
        raise ValueError(f"cannot select {N} survivors from {len(merged)} candidates")
    if table is None:
        table = assign_fitness(merged, eps)
    cv = np.array([ind.cv for ind in merged])
    chosen, nfeas = select_indices(table.fit, cv, table.distances, N, eps)
    return SelectionOutcome([merged[i] for i in chosen], chosen, nfeas, N - nfeas)
