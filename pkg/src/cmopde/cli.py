"""Batch experiment driver.

    cmopde run --problem box-sphere --runs 30 --out results/
    cmopde eval results/
    cmopde compare results/ other_results/

The output root defaults to ``$CMOPDE_OUT`` (or ``./results``) when ``--out``
is omitted.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import platform
import re
import sys
import tempfile
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .engine import (RunConfig, RunTrace, TraceFormatError, read_trace_csv, run,
                     write_population_csv, write_trace_csv)
from .metrics import (TargetSpec, final_quality, load_targets, median_target, penalty_base,
                      time_to_target)
from .problems import DEFAULT_EQ_TOL, get_problem
from .stats import friedman, pairwise_summary

OUT_ENV = "CMOPDE_OUT"
TRACE_RE = re.compile(r"^(?P<problem>.+)_run(?P<run>\d+)\.csv$")


class CLIError(Exception):
    pass


@dataclass
class ExperimentConfig:
    problems: list[str]
    runs: int = 30
    seed: int = 0
    pop_size: int = 100
    max_fe: int = 200_000
    checkpoint_interval: int = 200
    eq_tol: float = DEFAULT_EQ_TOL
    out: str = "results"
    targets: str | None = None
    fronts: dict[str, str] = field(default_factory=dict)

    def validate(self):
        if self.runs < 1:
            raise CLIError("--runs must be at least 1")
        if not self.problems:
            raise CLIError("no problems selected")
        for pid in self.problems:
            try:
                get_problem(pid)
            except KeyError as exc:
                raise CLIError(exc.args[0]) from None
        try:
            self.run_config(self.problems[0], 0).validate()
        except ValueError as exc:
            raise CLIError(str(exc)) from None

    def run_config(self, problem_id: str, run_index: int) -> RunConfig:
        return RunConfig(self.pop_size, self.max_fe, self.checkpoint_interval, self.seed,
                         stream_key(problem_id, run_index), self.eq_tol)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, d):
        return cls(**d)


def stream_key(problem_id: str, run_index: int) -> tuple[int, int]:
    """Substream key for one run: independent of batch composition and order."""
    return (zlib.crc32(problem_id.encode()), int(run_index))


def _atomic_write(path: Path, writer) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        writer(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def execute_run(cfg: ExperimentConfig, problem_id: str, run_index: int) -> str:
    problem = get_problem(problem_id)
    if problem_id in cfg.fronts:
        problem = problem.with_front(cfg.fronts[problem_id])
    trace = run(problem, cfg.run_config(problem_id, run_index))
    out = Path(cfg.out)
    name = f"{problem_id}_run{run_index}"
    _atomic_write(out / f"{name}.csv", lambda p: write_trace_csv(p, trace))
    _atomic_write(out / f"{name}.pop.csv",
                  lambda p: write_population_csv(p, trace.final_population,
                                                 problem.n_var, problem.n_obj))
    return name


def _execute(args):
    return execute_run(*args)


def cmd_run(cfg: ExperimentConfig, jobs: int = 1) -> int:
    cfg.validate()
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise CLIError(f"output directory {out} is not writable: {exc}") from None
    tasks = [(cfg, pid, r) for pid in cfg.problems for r in range(cfg.runs)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for name in pool.map(_execute, tasks):
                print(f"wrote {name}")
    else:
        for t in tasks:
            print(f"wrote {_execute(t)}")
    manifest = {
        "config": cfg.to_dict(),
        "seeds": [{"problem": pid, "run": r, "seed": cfg.seed,
                   "stream_key": list(stream_key(pid, r))} for _, pid, r in tasks],
        "versions": {"cmopde": __version__, "numpy": np.__version__,
                     "python": platform.python_version()},
    }
    _atomic_write(out / "manifest.json",
                  lambda p: Path(p).write_text(json.dumps(manifest, indent=2) + "\n"))
    return 0


def load_manifest(trace_dir) -> ExperimentConfig | None:
    path = Path(trace_dir) / "manifest.json"
    if not path.exists():
        return None
    return ExperimentConfig.from_dict(json.loads(path.read_text())["config"])


def load_trace_dir(trace_dir) -> dict[str, list[RunTrace]]:
    """``{problem: [trace for run 0, run 1, ...]}`` from a trace directory."""
    trace_dir = Path(trace_dir)
    if not trace_dir.is_dir():
        raise CLIError(f"{trace_dir} is not a directory")
    found: dict[str, dict[int, RunTrace]] = {}
    for path in sorted(trace_dir.iterdir()):
        m = TRACE_RE.match(path.name)
        if not m or path.name.endswith(".pop.csv"):
            continue
        try:
            trace = read_trace_csv(path)
        except TraceFormatError as exc:
            raise CLIError(str(exc)) from None
        found.setdefault(m["problem"], {})[int(m["run"])] = trace
    if not found:
        raise CLIError(f"no trace files (<problem>_run<k>.csv) in {trace_dir}")
    return {pid: [runs[k] for k in sorted(runs)] for pid, runs in sorted(found.items())}


def _num(v):
    v = float(v)
    return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")


def _resolve_targets(pooled: dict[str, list[float]], targets_path):
    """Targets per problem plus provenance; None when no target is derivable."""
    given = load_targets(targets_path) if targets_path else {}
    resolved, provenance = {}, {}
    for pid, finals in pooled.items():
        if pid in given:
            resolved[pid], provenance[pid] = given[pid], f"file:{targets_path}"
            continue
        try:
            resolved[pid] = TargetSpec(pid, median_target(finals))
            provenance[pid] = "derived:median-final-igd"
        except ValueError:
            resolved[pid], provenance[pid] = None, "none:no-feasible-run"
    return resolved, provenance


def evaluate_runs(traces: list[RunTrace], target: TargetSpec | None, B: float) -> list[dict]:
    out = []
    for k, t in enumerate(traces):
        ttt = len(t) + 1 if target is None else time_to_target(t, target)
        out.append({"run": k, "final_igd": t.final_igd, "final_cv": t.final_cv,
                    "q": final_quality(t.final_igd, t.final_cv, B), "ttt": ttt})
    return out


def cmd_eval(trace_dir, targets=None) -> int:
    trace_dir = Path(trace_dir)
    data = load_trace_dir(trace_dir)
    pooled = {pid: [t.final_igd for t in runs] for pid, runs in data.items()}
    resolved, provenance = _resolve_targets(pooled, targets)
    report = {"trace_dir": str(trace_dir), "targets_file": str(targets) if targets else None,
              "problems": {}}
    lines = [f"{'problem':<14}{'runs':>5}{'target':>12}{'med IGD':>12}{'med Q':>12}"
             f"{'med TTT':>9}{'feasible':>9}"]
    for pid, runs in data.items():
        B = penalty_base(pooled[pid])
        spec = resolved[pid]
        rows = evaluate_runs(runs, spec, B)
        qs = [r["q"] for r in rows]
        tts = [r["ttt"] for r in rows]
        nfeas = sum(1 for r in rows if r["final_cv"] == 0.0)
        report["problems"][pid] = {
            "target": None if spec is None else spec.target_igd,
            "target_provenance": provenance[pid],
            "B_p": B,
            "runs": [{k: _num(v) if isinstance(v, float) else v for k, v in r.items()}
                     for r in rows],
        }
        tgt = "-" if spec is None else f"{spec.target_igd:.4e}"
        lines.append(f"{pid:<14}{len(rows):>5}{tgt:>12}{np.median(pooled[pid]):>12.4e}"
                     f"{np.median(qs):>12.4e}{np.median(tts):>9.1f}{nfeas:>9d}")
    text = "\n".join(lines) + "\n"
    (trace_dir / "eval.json").write_text(json.dumps(report, indent=2) + "\n")
    (trace_dir / "eval.txt").write_text(text)
    sys.stdout.write(text)
    return 0


def cmd_compare(trace_dir_a, trace_dir_b, targets=None, json_out=None, alpha=0.05) -> int:
    a = load_trace_dir(trace_dir_a)
    b = load_trace_dir(trace_dir_b)
    if set(a) != set(b):
        only_a = sorted(set(a) - set(b))
        only_b = sorted(set(b) - set(a))
        raise CLIError(f"problem sets differ: only in A {only_a}, only in B {only_b}")
    for pid in a:
        if len(a[pid]) != len(b[pid]):
            raise CLIError(f"{pid}: run counts differ ({len(a[pid])} vs {len(b[pid])})")
    pooled = {pid: [t.final_igd for t in a[pid] + b[pid]] for pid in a}
    resolved, provenance = _resolve_targets(pooled, targets)
    q_a, q_b, t_a, t_b = {}, {}, {}, {}
    for pid in a:
        B = penalty_base(pooled[pid])
        ra = evaluate_runs(a[pid], resolved[pid], B)
        rb = evaluate_runs(b[pid], resolved[pid], B)
        q_a[pid], q_b[pid] = [r["q"] for r in ra], [r["q"] for r in rb]
        t_a[pid], t_b[pid] = [r["ttt"] for r in ra], [r["ttt"] for r in rb]
    report = {"a": str(trace_dir_a), "b": str(trace_dir_b), "alpha": alpha,
              "target_provenance": provenance}
    lines = [f"A = {trace_dir_a}", f"B = {trace_dir_b}",
             f"{'metric':<8}{'W/T/L':>10}{'Holm':>10}{'med A12':>9}{'Friedman chi2':>15}{'p':>10}"]
    for name, sa, sb in (("final_q", q_a, q_b), ("ttt", t_a, t_b)):
        s = pairwise_summary(sa, sb, alpha)
        medians = np.column_stack([s.medians_ours, s.medians_theirs])
        fr = friedman(medians) if len(s.problems) >= 2 else None
        report[name] = {
            "problems": s.problems, "p_values": s.p_values, "outcomes": s.outcomes,
            "holm": s.holm, "a12": s.a12, "wtl": list(s.wtl), "holm_wtl": list(s.holm_wtl),
            "median_a12": s.median_a12,
            "friedman_inputs": medians.tolist(),
            "friedman": None if fr is None else asdict(fr),
        }
        wtl = "/".join(map(str, s.wtl))
        holm = "/".join(map(str, s.holm_wtl))
        frs = ("-", "-") if fr is None else (f"{fr.chi2:.3f}", f"{fr.p:.3g}")
        lines.append(f"{name:<8}{wtl:>10}{holm:>10}{s.median_a12:>9.2f}{frs[0]:>15}{frs[1]:>10}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if json_out:
        Path(json_out).write_text(json.dumps(report, indent=2) + "\n")
    return 0


def _parse_front(spec: str) -> tuple[str, str]:
    if "=" not in spec:
        raise argparse.ArgumentTypeError("expected PROBLEM=PATH")
    pid, path = spec.split("=", 1)
    return pid, path


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cmopde", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="execute seeded runs and write trace files")
    r.add_argument("--problem", action="append", help="problem id (repeatable; default: all)")
    r.add_argument("--runs", type=int, default=30)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--max-fe", type=int, default=200_000)
    r.add_argument("--pop-size", type=int, default=100)
    r.add_argument("--checkpoint-interval", type=int, default=200)
    r.add_argument("--eq-tol", type=float, default=DEFAULT_EQ_TOL)
    r.add_argument("--out", default=None)
    r.add_argument("--targets", default=None, help="target CSV recorded in the manifest")
    r.add_argument("--front", action="append", type=_parse_front, default=[],
                   metavar="PROBLEM=PATH", help="reference-front override")
    r.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    e = sub.add_parser("eval", help="final IGD, CV, Q and TTT for a trace directory")
    e.add_argument("trace_dir")
    e.add_argument("--targets", default=None)

    c = sub.add_parser("compare", help="pairwise statistics between two trace directories")
    c.add_argument("trace_dir_a")
    c.add_argument("trace_dir_b")
    c.add_argument("--targets", default=None)
    c.add_argument("--json", dest="json_out", default=None)
    c.add_argument("--alpha", type=float, default=0.05)
    return ap


def main(argv=None) -> int:
    from .problems import builtin_suite

    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            out = args.out or os.environ.get(OUT_ENV, "results")
            cfg = ExperimentConfig(
                problems=args.problem or [p.id for p in builtin_suite()],
                runs=args.runs, seed=args.seed, pop_size=args.pop_size, max_fe=args.max_fe,
                checkpoint_interval=args.checkpoint_interval, eq_tol=args.eq_tol, out=out,
                targets=args.targets, fronts=dict(args.front))
            return cmd_run(cfg, jobs=args.jobs)
        if args.command == "eval":
            targets = args.targets
            if targets is None:
                cfg = load_manifest(args.trace_dir)
                targets = cfg.targets if cfg is not None else None
            return cmd_eval(args.trace_dir, targets)
        return cmd_compare(args.trace_dir_a, args.trace_dir_b, args.targets, args.json_out,
                           args.alpha)
    except (CLIError, OSError, ValueError) as exc:
        print(f"cmopde: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
