"""Constrained bi-objective test problems and reference-front handling.

Every built-in problem has the shape

    minimize  (f1(x), f2(x))
    s.t.      g_i(x) <= 0,  h_j(x) = 0,  lower <= x <= upper

with ``f1 = x1`` and a distance term built from the remaining variables, so
the Pareto set lies in a known low-dimensional slice of the box. That slice is
what :func:`sample_reference_front` samples densely to build the stored
reference fronts.

Built-in suite (D = 10 unless stated):

``box-sphere``
    x in [0, 1]^D, s = sum_{k>=2} x_k^2;
    f1 = x1, f2 = 1 - x1 + s;  g1 = 0.2 - x1.
    Linear front cut by an active lower bound on f1.
``convex-cut``
    x1 in [0, 1], x_k in [-1, 1], s = sum_{k>=2} x_k^2;
    f1 = x1, f2 = 1 + s - sqrt(x1);  g1 = 0.9 - (f1 + f2).
    The constraint removes the middle of the convex front; the constrained
    front runs along the active boundary f1 + f2 = 0.9.
``sine-gap``
    x1 in [0, 1], x_k in [-1, 1], s = sum_{k>=2} x_k^2;
    f1 = x1, f2 = 1 + s - x1^2;  g1 = -sin(3 pi x1).
    Feasible region and front are disconnected (x1 in [0, 1/3] u [2/3, 1]).
``ball-zdt``
    x1 in [0, 1], x_k in [-1, 1], t = sum_{k>=2} (x_k - 0.3)^2;
    f1 = x1, f2 = 1 + t - sqrt(x1);  g1 = t - 1.5.
    Front identical to the unconstrained one, but only a few percent of the
    box is feasible.
``eq-ridge``
    x1, x2 in [0, 1], x_k in [-1, 1] for k >= 3, s = sum_{k>=3} x_k^2;
    f1 = x1, f2 = 1 + s - sqrt(x1);  g1 = x2 - 0.81;  h1 = x2 - x1^2.
    Equality-constrained: the feasible set has empty interior.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from .core import Bounds, RandomStream

DEFAULT_EQ_TOL = 1e-4


class EvaluationError(RuntimeError):
    pass


class FrontFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ProblemDefinition:
    """Evaluation contract for one CMOP.

    ``evaluator(x)`` returns ``(f, g, h)`` as float arrays of lengths
    ``n_obj``, ``n_ineq`` and ``n_eq``.
    """

    id: str
    n_var: int
    n_obj: int
    bounds: Bounds
    n_ineq: int
    n_eq: int
    evaluator: Callable[[np.ndarray], tuple]
    front_path: Path | None = None
    slice_sampler: Callable | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.n_obj < 2 or self.n_var < 1:
            raise ValueError("need at least 2 objectives and 1 variable")
        if self.bounds.dim != self.n_var:
            raise ValueError("bounds dimension does not match n_var")

    @cached_property
    def reference_front(self) -> np.ndarray:
        if self.front_path is None:
            raise FileNotFoundError(f"problem {self.id!r} has no reference front")
        return load_reference_front(self.front_path)

    def with_front(self, path) -> "ProblemDefinition":
        return ProblemDefinition(self.id, self.n_var, self.n_obj, self.bounds, self.n_ineq,
                                 self.n_eq, self.evaluator, Path(path), self.slice_sampler)


def evaluate(problem: ProblemDefinition, x) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n_var,):
        raise ValueError(f"{problem.id}: expected {problem.n_var} variables, got shape {x.shape}")
    f, g, h = problem.evaluator(x)
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float).reshape(-1)
    h = np.asarray(h, dtype=float).reshape(-1)
    if not math.isfinite(f.sum() + g.sum() + h.sum()):
        raise EvaluationError(f"non-finite output from problem {problem.id!r} at x={x.tolist()}")
    return f, g, h


def aggregate_cv(g, h=(), eq_tol: float = DEFAULT_EQ_TOL) -> float:
    """Sum of inequality breaches plus equality breaches beyond ``eq_tol``."""
    cv = 0.0
    for v in g:
        if v > 0.0:
            cv += float(v)
    for v in h:
        if abs(v) > eq_tol:
            cv += abs(float(v)) - eq_tol
    return cv


def load_reference_front(path) -> np.ndarray:
    """Read a whitespace-separated point file, skipping blank and ``#`` lines."""
    path = Path(path)
    rows = []
    width = None
    with path.open() as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                row = [float(tok) for tok in text.split()]
            except ValueError as exc:
                raise FrontFormatError(f"{path}:{lineno}: unparseable row: {exc}") from None
            if width is None:
                width = len(row)
                if width < 2:
                    raise FrontFormatError(f"{path}:{lineno}: need at least 2 objectives")
            elif len(row) != width:
                raise FrontFormatError(
                    f"{path}:{lineno}: expected {width} columns, found {len(row)}")
            rows.append(row)
    if not rows:
        raise FrontFormatError(f"{path}: no points")
    return np.array(rows, dtype=float)


def save_points(path, points, header: str = "") -> None:
    path = Path(path)
    with path.open("w") as fh:
        for line in header.splitlines():
            fh.write(f"# {line}\n")
        for row in np.atleast_2d(points):
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


# --- dense-sampling reference-front oracle ---------------------------------

def nondominated_mask(F: np.ndarray) -> np.ndarray:
    """Strict Pareto filter. Duplicates keep only their first occurrence."""
    F = np.asarray(F, dtype=float)
    n = F.shape[0]
    if F.shape[1] == 2:
        order = np.lexsort((F[:, 1], F[:, 0]))
        keep = np.zeros(n, dtype=bool)
        best = math.inf
        for i in order:
            if F[i, 1] < best:
                keep[i] = True
                best = F[i, 1]
        return keep
    keep = np.ones(n, dtype=bool)
    for i in range(n):
        if not keep[i]:
            continue
        le = np.all(F <= F[i], axis=1)
        lt = np.any(F < F[i], axis=1)
        if np.any(le & lt):
            keep[i] = False
            continue
        dup = np.all(F == F[i], axis=1)
        dup[: i + 1] = False
        keep[dup] = False
    return keep


def farthest_point_thin(F: np.ndarray, n_points: int) -> np.ndarray:
    """Indices of a greedy max-min subset, seeded with the extreme of f1."""
    n = F.shape[0]
    if n <= n_points:
        return np.arange(n)
    chosen = [int(np.argmin(F[:, 0])), int(np.argmax(F[:, 0]))]
    mind = np.minimum(np.linalg.norm(F - F[chosen[0]], axis=1),
                      np.linalg.norm(F - F[chosen[1]], axis=1))
    while len(chosen) < n_points:
        j = int(np.argmax(mind))
        chosen.append(j)
        mind = np.minimum(mind, np.linalg.norm(F - F[j], axis=1))
    return np.sort(np.array(chosen))


def sample_reference_front(problem: ProblemDefinition, n_feasible: int = 1_000_000,
                           n_points: int = 1000, seed: int = 0, eq_tol: float = DEFAULT_EQ_TOL,
                           batch: int = 200_000):
    """Build a reference front by dense sampling of the problem's Pareto slice.

    Samples are drawn until ``n_feasible`` feasible points are collected,
    filtered to the nondominated set and thinned to ``n_points`` by
    farthest-point selection. Returns ``(X, F)`` of the thinned front.
    """
    if problem.slice_sampler is None:
        raise ValueError(f"problem {problem.id!r} has no slice sampler")
    stream = RandomStream(seed)
    Xs, Fs = [], []
    collected = 0
    while collected < n_feasible:
        X = problem.slice_sampler(stream, batch)
        F = np.empty((X.shape[0], problem.n_obj))
        ok = np.zeros(X.shape[0], dtype=bool)
        for i, x in enumerate(X):
            f, g, h = evaluate(problem, x)
            F[i] = f
            ok[i] = aggregate_cv(g, h, eq_tol) == 0.0
        X, F = X[ok], F[ok]
        # filter per batch to bound memory; the union is re-filtered below
        nd = nondominated_mask(F)
        Xs.append(X[nd])
        Fs.append(F[nd])
        collected += int(ok.sum())
    X = np.concatenate(Xs)
    F = np.concatenate(Fs)
    nd = nondominated_mask(F)
    X, F = X[nd], F[nd]
    idx = farthest_point_thin(F, n_points)
    return X[idx], F[idx]


# --- built-in suite ----------------------------------------------------------

_DIM = 10


def _box_sphere(x):
    s = float(np.dot(x[1:], x[1:]))
    return (x[0], 1.0 - x[0] + s), (0.2 - x[0],), ()


def _convex_cut(x):
    s = float(np.dot(x[1:], x[1:]))
    f1 = x[0]
    f2 = 1.0 + s - math.sqrt(x[0])
    return (f1, f2), (0.9 - (f1 + f2),), ()


def _sine_gap(x):
    s = float(np.dot(x[1:], x[1:]))
    return (x[0], 1.0 + s - x[0] ** 2), (-math.sin(3.0 * math.pi * x[0]),), ()


def _ball_zdt(x):
    d = x[1:] - 0.3
    t = float(np.dot(d, d))
    return (x[0], 1.0 + t - math.sqrt(x[0])), (t - 1.5,), ()


def _eq_ridge(x):
    s = float(np.dot(x[2:], x[2:]))
    return (x[0], 1.0 + s - math.sqrt(x[0])), (x[1] - 0.81,), (x[1] - x[0] ** 2,)


def _slice_x1(fill: float = 0.0):
    def sampler(stream, n):
        X = np.full((n, _DIM), fill)
        X[:, 0] = stream.random(n)
        return X
    return sampler


def _slice_convex_cut(stream, n):
    # constrained front needs s up to max(sqrt(f1) - f1) - 0.1 = 0.15
    X = np.zeros((n, _DIM))
    X[:, 0] = stream.random(n)
    X[:, 1] = 0.4 * stream.random(n)
    return X


def _slice_eq_ridge(stream, n):
    X = np.zeros((n, _DIM))
    X[:, 0] = stream.random(n)
    X[:, 1] = X[:, 0] ** 2
    return X


def _data_path(problem_id: str) -> Path:
    return Path(str(resources.files("cmopde") / "data" / f"{problem_id}.pf"))


def _make(pid, lower, upper, n_ineq, n_eq, fn, sampler):
    return ProblemDefinition(pid, _DIM, 2, Bounds(np.array(lower, float), np.array(upper, float)),
                             n_ineq, n_eq, fn, _data_path(pid), sampler)


def builtin_suite() -> list[ProblemDefinition]:
    sym = [-1.0] * (_DIM - 1)
    one = [1.0] * (_DIM - 1)
    return [
        _make("box-sphere", [0.0] * _DIM, [1.0] * _DIM, 1, 0, _box_sphere, _slice_x1()),
        _make("convex-cut", [0.0] + sym, [1.0] + one, 1, 0, _convex_cut, _slice_convex_cut),
        _make("sine-gap", [0.0] + sym, [1.0] + one, 1, 0, _sine_gap, _slice_x1()),
        _make("ball-zdt", [0.0] + sym, [1.0] + one, 1, 0, _ball_zdt, _slice_x1(0.3)),
        _make("eq-ridge", [0.0, 0.0] + sym[1:], [1.0, 1.0] + one[1:], 1, 1, _eq_ridge,
              _slice_eq_ridge),
    ]


def get_problem(problem_id: str) -> ProblemDefinition:
    for p in builtin_suite():
        if p.id == problem_id:
            return p
    known = ", ".join(p.id for p in builtin_suite())
    raise KeyError(f"unknown problem {problem_id!r} (known: {known})")
