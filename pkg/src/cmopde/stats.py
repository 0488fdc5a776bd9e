"""Nonparametric comparison battery for benchmark results.

Everything here treats metric values as "smaller is better". Outcomes are
reported from the point of view of the first sample ("ours"): ``"W"`` means
ours is significantly smaller.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.stats import chi2 as chi2_dist
from scipy.stats import norm, rankdata

from .metrics import TargetSpec, final_quality, median_target, penalty_base, time_to_target

WIN, TIE, LOSS = "W", "T", "L"


def wilcoxon_ranksum(a, b, alpha: float = 0.05) -> tuple[float, str]:
    """Two-sided rank-sum test, normal approximation with tie-corrected variance.

    No continuity correction is applied. Returns ``(p, outcome)``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n, m = a.size, b.size
    if n < 2 or m < 2:
        raise ValueError("wilcoxon_ranksum needs at least 2 values per sample")
    pooled = np.concatenate([a, b])
    ranks = rankdata(pooled)
    w = float(ranks[:n].sum())
    total = n + m
    _, counts = np.unique(pooled, return_counts=True)
    tie_term = float(np.sum(counts.astype(float) ** 3 - counts)) / (total * (total - 1))
    var = n * m / 12.0 * ((total + 1) - tie_term)
    if var <= 0.0:
        return 1.0, TIE
    mean = n * (total + 1) / 2.0
    z = (w - mean) / math.sqrt(var)
    p = float(min(1.0, 2.0 * norm.sf(abs(z))))
    if p < alpha and w != mean:
        return p, WIN if w < mean else LOSS
    return p, TIE


def holm_correct(pvals, alpha: float = 0.05) -> list[bool]:
    """Holm step-down: which hypotheses stay significant."""
    p = np.asarray(pvals, dtype=float)
    k = p.size
    significant = [False] * k
    for step, i in enumerate(np.argsort(p, kind="stable")):
        if p[i] < alpha / (k - step):
            significant[int(i)] = True
        else:
            break
    return significant


def holm_outcomes(pvals, outcomes, alpha: float = 0.05) -> list[str]:
    """Raw W/L outcomes that fail the Holm threshold become ties."""
    keep = holm_correct(pvals, alpha)
    return [o if s else TIE for o, s in zip(outcomes, keep)]


def tally(outcomes) -> tuple[int, int, int]:
    return outcomes.count(WIN), outcomes.count(TIE), outcomes.count(LOSS)


@dataclass
class FriedmanResult:
    chi2: float
    df: int
    p: float
    avg_ranks: list[float]


def friedman_from_ranks(avg_ranks, n_problems: int) -> FriedmanResult:
    R = np.asarray(avg_ranks, dtype=float)
    k = R.size
    chi2 = 12.0 * n_problems / (k * (k + 1)) * float(np.sum((R - (k + 1) / 2.0) ** 2))
    return FriedmanResult(chi2, k - 1, float(chi2_dist.sf(chi2, k - 1)), R.tolist())


def friedman(metric_medians) -> FriedmanResult:
    """Friedman test over a problems x algorithms matrix of medians (lower ranks first)."""
    X = np.asarray(metric_medians, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2 or X.shape[1] < 2:
        raise ValueError("friedman needs at least 2 problems and 2 algorithms")
    ranks = np.vstack([rankdata(row) for row in X])
    return friedman_from_ranks(ranks.mean(axis=0), X.shape[0])


def vargha_delaney_a12(a, b) -> float:
    """Probability that a value of ``a`` is smaller than one of ``b`` (ties count half)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ValueError("A12 needs non-empty samples")
    greater = np.sum(b[None, :] > a[:, None])
    equal = np.sum(b[None, :] == a[:, None])
    return float((greater + 0.5 * equal) / (a.size * b.size))


@dataclass
class PairwiseSummary:
    problems: list[str]
    p_values: list[float]
    outcomes: list[str]
    holm: list[str]
    a12: list[float]
    medians_ours: list[float]
    medians_theirs: list[float]

    @property
    def wtl(self):
        return tally(self.outcomes)

    @property
    def holm_wtl(self):
        return tally(self.holm)

    @property
    def median_a12(self) -> float:
        return float(np.median(self.a12))


def pairwise_summary(ours: dict, theirs: dict, alpha: float = 0.05) -> PairwiseSummary:
    """Per-problem rank-sum tests plus Holm and A12 over ``{problem: samples}`` maps."""
    if set(ours) != set(theirs):
        raise ValueError(f"problem sets differ: {sorted(set(ours) ^ set(theirs))}")
    problems = sorted(ours)
    pv, out, a12, mo, mt = [], [], [], [], []
    for pid in problems:
        a, b = ours[pid], theirs[pid]
        if len(a) != len(b):
            raise ValueError(f"{pid}: run counts differ ({len(a)} vs {len(b)})")
        p, o = wilcoxon_ranksum(a, b, alpha)
        pv.append(p)
        out.append(o)
        a12.append(vargha_delaney_a12(a, b))
        mo.append(float(np.median(a)))
        mt.append(float(np.median(b)))
    return PairwiseSummary(problems, pv, out, holm_outcomes(pv, out, alpha), a12, mo, mt)


# --- approximate target-attainment scoring ---------------------------------

SCORE_WEIGHTS = {"speed": 1.0, "accuracy": 1.0, "constraint": 1.0}


@dataclass
class ScoreTable:
    """Approximate, not official, U-score-style aggregation.

    Speed      sum over runs of (trace_length + 1 - TTT)
    Accuracy   per problem, (k - midrank) of each algorithm's median final Q
    Constraint number of runs whose final population contains a feasible member
    Total      weighted sum with :data:`SCORE_WEIGHTS`
    """

    algorithms: list[str]
    speed: dict[str, float]
    accuracy: dict[str, float]
    constraint: dict[str, float]
    total: dict[str, float]
    targets: dict[str, float | None]
    label: str = "approximate, not official"
    per_problem: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def uscore_report(traces: dict, targets: dict | None = None) -> ScoreTable:
    """Score ``traces[algorithm][problem] -> list of RunTrace``.

    Missing targets are derived per problem as the median finite final IGD
    over all algorithms' runs pooled.
    """
    algos = sorted(traces)
    if not algos:
        raise ValueError("no algorithms given")
    problems = sorted(traces[algos[0]])
    for alg in algos:
        if sorted(traces[alg]) != problems:
            raise ValueError(f"{alg}: problem set differs")
    targets = dict(targets or {})
    speed = {a: 0.0 for a in algos}
    accuracy = {a: 0.0 for a in algos}
    constraint = {a: 0.0 for a in algos}
    used_targets: dict[str, float | None] = {}
    per_problem = {}
    k = len(algos)
    for pid in problems:
        counts = {len(traces[a][pid]) for a in algos}
        if len(counts) != 1:
            raise ValueError(f"{pid}: mismatched run counts {sorted(counts)}")
        pooled = [t.final_igd for a in algos for t in traces[a][pid]]
        spec = targets.get(pid)
        if spec is None:
            try:
                spec = TargetSpec(pid, median_target(pooled))
            except ValueError:
                spec = None
        used_targets[pid] = None if spec is None else spec.target_igd
        B = penalty_base(pooled)
        med_q = []
        row = {}
        for a in algos:
            runs = traces[a][pid]
            s = 0.0
            for t in runs:
                ttt = len(t) + 1 if spec is None else time_to_target(t, spec)
                s += len(t) + 1 - ttt
            q = [final_quality(t.final_igd, t.final_cv, B) for t in runs]
            c = sum(1 for t in runs if t.final_cv == 0.0)
            speed[a] += s
            constraint[a] += c
            med_q.append(float(np.median(q)))
            row[a] = {"speed": s, "median_q": med_q[-1], "constraint": c}
        for a, r in zip(algos, rankdata(med_q)):
            accuracy[a] += k - float(r)
            row[a]["accuracy"] = k - float(r)
        per_problem[pid] = row
    total = {a: SCORE_WEIGHTS["speed"] * speed[a] + SCORE_WEIGHTS["accuracy"] * accuracy[a]
             + SCORE_WEIGHTS["constraint"] * constraint[a] for a in algos}
    return ScoreTable(algos, speed, accuracy, constraint, total, used_targets,
                      per_problem=per_problem)
