"""Naive reference implementations used as independent test oracles.

Pure Python loops on lists; nothing here imports the package's numeric code.
"""
import math


def dominates(fa, fb):
    return all(a <= b for a, b in zip(fa, fb)) and any(a < b for a, b in zip(fa, fb))


def eps_dom(fa, ca, fb, cb, eps):
    ra = 0.0 if ca <= eps else ca
    rb = 0.0 if cb <= eps else cb
    if ra < rb:
        return True
    return ra == rb and dominates(fa, fb)


def dist(a, b):
    s = 0.0
    for x, y in zip(a, b):
        s += (x - y) * (x - y)
    return math.sqrt(s)


def fitness(F, cv, eps):
    """Return (S, R, D, fit) lists by direct evaluation of the definitions."""
    n = len(F)
    S = [sum(1 for j in range(n) if j != i and eps_dom(F[i], cv[i], F[j], cv[j], eps))
         for i in range(n)]
    R = [float(sum(S[j] for j in range(n) if j != i and eps_dom(F[j], cv[j], F[i], cv[i], eps)))
         for i in range(n)]
    k = math.isqrt(n)
    D = []
    for i in range(n):
        ds = sorted(dist(F[i], F[j]) for j in range(n) if j != i)
        D.append(1.0 / (ds[k - 1] + 2.0))
    return S, R, D, [r + d for r, d in zip(R, D)]


def truncate(F, target):
    """Step-by-step lexicographic nearest-neighbour removal; returns kept indices."""
    alive = list(range(len(F)))
    while len(alive) > target:
        best = None
        for i in alive:
            key = tuple(sorted(dist(F[i], F[j]) for j in alive if j != i))
            if best is None or key < best[0]:
                best = (key, i)
        alive.remove(best[1])
    return alive


def igd(P, Pstar):
    total = 0.0
    for y in Pstar:
        total += min(dist(x, y) for x in P)
    return total / len(Pstar)


def select(F, cv, fit, N, eps):
    """Selection rule written out longhand; returns the survivor index set."""
    n = len(F)
    order = sorted(range(n), key=lambda i: (fit[i], i))
    feas = [i for i in order if cv[i] <= eps]
    infeas = [i for i in order if cv[i] > eps]
    if len(feas) > N:
        nd = sorted(i for i in feas if fit[i] < 1.0)
        if len(nd) > N:
            kept = truncate([F[i] for i in nd], N)
            return {nd[j] for j in kept}
        rest = [i for i in feas if fit[i] >= 1.0]
        return set(nd) | set(rest[: N - len(nd)])
    return set(feas) | set(infeas[: N - len(feas)])


def rank_sum_exact_p(a, b):
    """Exact two-sided permutation p-value of the rank-sum statistic (small samples)."""
    from itertools import combinations

    pooled = list(a) + list(b)
    order = sorted(range(len(pooled)), key=lambda i: pooled[i])
    ranks = [0.0] * len(pooled)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and pooled[order[j + 1]] == pooled[order[i]]:
            j += 1
        for t in range(i, j + 1):
            ranks[order[t]] = (i + j) / 2.0 + 1.0
        i = j + 1
    n = len(a)
    obs = sum(ranks[:n])
    mean = n * (len(pooled) + 1) / 2.0
    count = total = 0
    for combo in combinations(range(len(pooled)), n):
        w = sum(ranks[c] for c in combo)
        total += 1
        if abs(w - mean) >= abs(obs - mean) - 1e-12:
            count += 1
    return count / total
