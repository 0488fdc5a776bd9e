"""Numeric building blocks shared by every stochastic operator.

All reals are float64. Randomness flows through :class:`RandomStream`, a thin
single-owner wrapper over numpy's PCG64 so that a run is reproducible from an
integer seed (or from a ``(master_seed, run_index)`` substream key).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class RandomStream:
    """Seedable random source with the handful of draws the solver needs.

    Parameters
    ----------
    seed : int
        Master seed.
    spawn_key : tuple of int, optional
        Substream key. Streams built with the same ``(seed, spawn_key)`` are
        identical; different keys give statistically independent streams.
    """

    def __init__(self, seed: int, spawn_key: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.spawn_key = tuple(int(k) for k in spawn_key)
        ss = np.random.SeedSequence(self.seed, spawn_key=self.spawn_key)
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def substream(self, *key: int) -> "RandomStream":
        return RandomStream(self.seed, self.spawn_key + tuple(key))

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        if lo > hi:
            raise ValueError(f"uniform: lo={lo} > hi={hi}")
        if lo == hi:
            return float(lo)
        return float(lo + (hi - lo) * self._gen.random())

    def uniform_array(self, lo, hi, size=None) -> np.ndarray:
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if np.any(lo > hi):
            raise ValueError("uniform_array: lo > hi")
        u = self._gen.random(size if size is not None else np.broadcast(lo, hi).shape)
        return lo + (hi - lo) * u

    def random(self, size=None):
        """Raw U[0, 1) draws (scalar float if ``size`` is None)."""
        if size is None:
            return float(self._gen.random())
        return self._gen.random(size)

    def cauchy(self, loc, scale: float):
        """Cauchy sample(s) via the inverse CDF ``loc + scale * tan(pi * (u - 1/2))``.

        ``loc`` may be an array, in which case one independent draw is made per
        element.
        """
        if not scale > 0:
            raise ValueError(f"cauchy: scale must be > 0, got {scale}")
        if np.ndim(loc) == 0:
            u = self._gen.random()
            return float(loc + scale * math.tan(math.pi * (u - 0.5)))
        loc = np.asarray(loc, dtype=float)
        u = self._gen.random(loc.shape)
        return loc + scale * np.tan(np.pi * (u - 0.5))

    def bernoulli(self, p: float) -> bool:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"bernoulli: p must lie in [0, 1], got {p}")
        return bool(self._gen.random() < p)

    def integer(self, n: int) -> int:
        """Uniform integer in ``[0, n)``."""
        if n < 1:
            raise ValueError("integer: n must be positive")
        # floor(u * n) with 53-bit u; bias is below 2**-40 for any practical n
        return min(int(self._gen.random() * n), n - 1)

    def choice(self, seq):
        return seq[self.integer(len(seq))]


@dataclass(frozen=True)
class Bounds:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float)
        hi = np.asarray(self.upper, dtype=float)
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ValueError("bounds must be two 1-d arrays of equal length")
        if np.any(lo > hi):
            raise ValueError("bounds: lower exceeds upper")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    @classmethod
    def uniform(cls, dim: int, lo: float, hi: float) -> "Bounds":
        return cls(np.full(dim, lo), np.full(dim, hi))


def clip(x, bounds: Bounds) -> np.ndarray:
    """Project a decision vector onto the box ``bounds``."""
    x = np.asarray(x, dtype=float)
    if x.shape != bounds.lower.shape:
        raise ValueError(f"clip: vector of length {x.shape} vs bounds of dimension {bounds.dim}")
    return np.minimum(np.maximum(x, bounds.lower), bounds.upper)


@dataclass
class Individual:
    """One candidate: decision vector, objectives, aggregated violation.

    ``fitness`` is a cache filled by the selection machinery and is only
    meaningful relative to the set it was last scored against.
    """

    x: np.ndarray
    f: np.ndarray | None = None
    cv: float = 0.0
    fitness: float = field(default=math.nan, compare=False)

    @property
    def evaluated(self) -> bool:
        return self.f is not None


def objectives_matrix(pop) -> np.ndarray:
    return np.array([ind.f for ind in pop], dtype=float)


def decisions_matrix(pop) -> np.ndarray:
    return np.array([ind.x for ind in pop], dtype=float)


def cv_array(pop) -> np.ndarray:
    return np.array([ind.cv for ind in pop], dtype=float)
