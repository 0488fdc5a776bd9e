"""Quality indicators: IGD, feasibility-aware final quality, time-to-target."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class TargetSpec:
    problem_id: str
    target_igd: float

    def __post_init__(self):
        if not self.target_igd >= 0:
            raise ValueError(f"target_igd must be >= 0, got {self.target_igd}")


def igd(P, Pstar) -> float:
    """Mean distance from each reference point to its nearest point of ``P``."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Pstar = np.atleast_2d(np.asarray(Pstar, dtype=float))
    if P.shape[0] == 0 or P.size == 0 or Pstar.size == 0:
        raise ValueError("igd: both sets must be non-empty")
    if P.shape[1] != Pstar.shape[1]:
        raise ValueError(f"igd: dimension mismatch {P.shape[1]} vs {Pstar.shape[1]}")
    total = 0.0
    for start in range(0, Pstar.shape[0], 2048):
        ref = Pstar[start:start + 2048]
        d2 = np.zeros((ref.shape[0], P.shape[0]))
        for k in range(P.shape[1]):
            diff = ref[:, None, k] - P[None, :, k]
            d2 += diff * diff
        total += float(np.sqrt(d2.min(axis=1)).sum())
    return total / Pstar.shape[0]


def penalty_base(final_igds) -> float:
    """Largest finite final IGD plus one (1.0 when no run is feasible)."""
    finite = [v for v in final_igds if math.isfinite(v)]
    return (max(finite) if finite else 0.0) + 1.0


def final_quality(final_igd: float, final_cv: float, B_p: float) -> float:
    if final_cv <= 0.0:
        return float(final_igd)
    return float(B_p + final_cv)


def time_to_target(trace, target) -> int:
    """1-based index of the first feasible checkpoint with IGD at or below target.

    ``trace`` is a RunTrace (or anything with ``igd`` and ``feasible_count``
    sequences); never reaching the target yields ``len(trace) + 1``.
    """
    t = target.target_igd if isinstance(target, TargetSpec) else float(target)
    igds = trace.igd
    feas = trace.feasible_count
    if len(igds) == 0:
        raise ValueError("time_to_target: empty trace")
    for i, (v, nf) in enumerate(zip(igds, feas), start=1):
        if nf > 0 and v <= t:
            return i
    return len(igds) + 1


def median_target(final_igds) -> float:
    """Median of the finite values; lower-middle element for even counts."""
    finite = sorted(v for v in final_igds if math.isfinite(v))
    if not finite:
        raise ValueError("median_target: no finite IGD value to derive a target from")
    return finite[(len(finite) - 1) // 2]


def load_targets(path) -> dict[str, TargetSpec]:
    path = Path(path)
    out = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row or row[0].startswith("#"):
                continue
            if lineno == 1 and row[0].strip() == "problem_id":
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'problem_id,target_igd'")
            try:
                out[row[0].strip()] = TargetSpec(row[0].strip(), float(row[1]))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
    return out


def save_targets(path, targets) -> None:
    with Path(path).open("w", newline="") as fh:
        fh.write("problem_id,target_igd\n")
        for spec in targets:
            fh.write(f"{spec.problem_id},{spec.target_igd!r}\n")
