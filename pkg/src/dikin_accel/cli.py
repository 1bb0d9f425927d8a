"""Command-line entry point: ``dikin-accel solve`` and ``dikin-accel bench``.

Exit codes of ``solve``: 0 Optimal, 2 Unbounded, 3 Infeasible,
4 IterationLimit, 5 NumericalFailure, 1 usage or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .diagnostics import TRACE_COLUMNS, TraceRecord
from .model import InfeasibleBounds, LinearProgram, RandomLpSpec, random_dense_lp, standardize
from .mps import MpsError, clamp_infinities, parse_mps
from .solver import EXIT_CODES, Algorithm, SolveOutcome, SolverConfig, Status, solve

SUMMARY_COLUMNS = (
    "instance", "m", "n", "algorithm", "alpha", "beta", "eps",
    "reps", "median_iters", "mean_time_s", "final_gap", "status",
)
DEFAULT_PAIRS = ((0.4, 0.2), (0.5, 0.1), (0.55, 0.1))
THREADS_ENV = "DIKIN_ACCEL_THREADS"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@dataclass(frozen=True)
class Instance:
    """A named standard-form LP, its start point and the original-objective offset."""

    name: str
    lp: LinearProgram
    x0: np.ndarray | None
    objective_offset: float = 0.0


@dataclass
class BenchmarkPlan:
    random_specs: list[RandomLpSpec] = field(default_factory=list)
    mps_paths: list[Path] = field(default_factory=list)
    algorithms: list[Algorithm] = field(default_factory=list)
    pairs: list[tuple[float, float]] = field(default_factory=lambda: list(DEFAULT_PAIRS))
    epsilons: list[float] = field(default_factory=lambda: [1e-4])
    repetitions: int = 15
    out_dir: Path = Path("bench_out")
    norm_rule: str = "gamma"
    max_iter: int = 10000

    def validate(self) -> None:
        if not (self.random_specs or self.mps_paths):
            raise UsageError("benchmark plan has no instances")
        if not self.algorithms:
            raise UsageError("benchmark plan has no algorithms")
        if not self.pairs or not self.epsilons or self.repetitions < 1:
            raise UsageError("benchmark plan needs pairs, epsilons and repetitions >= 1")


def load_mps(path: str | Path, clamp: float | None = None) -> Instance:
    with open(path, "rb") as fh:
        glp, _ = parse_mps(fh)
    if clamp is not None:
        glp = clamp_infinities(glp, clamp)
    lp, cmap = standardize(glp)
    name = glp.name or Path(path).stem
    return Instance(name, lp, None, cmap.objective_offset)


def random_instance(spec: RandomLpSpec) -> Instance:
    lp, x0 = random_dense_lp(spec)
    return Instance(f"rand_{spec.m}x{spec.n}_s{spec.seed}", lp, x0)


def write_trace(path: str | Path, trace: list[TraceRecord]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
        for rec in trace:
            writer.writerow(["" if v is None else repr(v) for v in (getattr(rec, c) for c in TRACE_COLUMNS)])


def _fmt(value: float | None) -> str:
    return "nan" if value is None or math.isnan(value) else f"{value:.12g}"


# --------------------------------------------------------------------------- solve

def cmd_solve(args: argparse.Namespace) -> int:
    if (args.mps is None) == (args.random is None):
        raise UsageError("give exactly one of --mps PATH or --random M N SEED")
    algorithm = Algorithm(args.algorithm)
    beta = 0.0 if algorithm is Algorithm.AFS and args.beta is None else args.beta
    if beta is None:
        beta = 0.1
    try:
        config = SolverConfig(
            algorithm=algorithm,
            alpha=args.alpha,
            beta=beta,
            epsilon=args.eps,
            norm_rule=args.norm,
            max_iter=args.max_iter,
            enforce_Q=not args.no_enforce_q,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    if args.mps is not None:
        inst = load_mps(args.mps, args.clamp_inf)
    else:
        m, n, seed = args.random
        try:
            spec = RandomLpSpec(m, n, seed)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        inst = random_instance(spec)

    out = solve(inst.lp, inst.x0, config)
    if args.trace:
        write_trace(args.trace, out.trace)
    objective = None if out.objective is None else out.objective + inst.objective_offset
    print(f"instance: {inst.name}")
    print(f"status: {out.status.value}")
    print(f"objective: {_fmt(objective)}")
    print(f"iterations: {out.iterations}")
    print(f"final_gap: {_fmt(out.final_gap)}")
    if out.message:
        print(f"message: {out.message}")
    return EXIT_CODES[out.status]


# --------------------------------------------------------------------------- bench

@dataclass(frozen=True)
class _Job:
    instance: int
    rep: int
    algorithm: Algorithm
    alpha: float
    beta: float
    eps: float


@dataclass(frozen=True)
class _RunResult:
    status: Status
    iterations: int
    seconds: float
    final_gap: float


def _instances(plan: BenchmarkPlan) -> list[list[Instance]]:
    """One list of per-repetition instances for every plan source.

    A random source yields a fresh seed per repetition (seed, seed+1, ...);
    an MPS source repeats the same problem.
    """
    groups = []
    for spec in plan.random_specs:
        groups.append([
            random_instance(RandomLpSpec(spec.m, spec.n, spec.seed + r, spec.mean, spec.variance, spec.convex_lambda))
            for r in range(plan.repetitions)
        ])
    for path in plan.mps_paths:
        inst = load_mps(path)
        groups.append([inst] * plan.repetitions)
    return groups


def _configs(plan: BenchmarkPlan) -> list[tuple[Algorithm, float, float, float]]:
    """(algorithm, alpha, beta, eps) rows; AFS runs with beta = 0 and duplicates collapse."""
    seen: dict[tuple, None] = {}
    for eps in plan.epsilons:
        for alpha, beta in plan.pairs:
            for alg in plan.algorithms:
                key = (alg, alpha, 0.0 if alg is Algorithm.AFS else beta, eps)
                seen.setdefault(key, None)
    return list(seen)


def _group_name(group: list[Instance], spec: RandomLpSpec | None) -> str:
    if spec is not None:
        return f"rand_{spec.m}x{spec.n}_s{spec.seed}"
    return group[0].name


def cmd_bench(plan: BenchmarkPlan) -> int:
    plan.validate()
    groups = _instances(plan)
    names = [_group_name(g, s) for g, s in zip(groups, plan.random_specs + [None] * len(plan.mps_paths))]
    configs = _configs(plan)
    multi_eps = len(plan.epsilons) > 1
    plan.out_dir.mkdir(parents=True, exist_ok=True)

    def trace_path(job: _Job) -> Path:
        folder = plan.out_dir / f"eps_{job.eps:g}" if multi_eps else plan.out_dir
        folder.mkdir(parents=True, exist_ok=True)
        return folder / f"{names[job.instance]}_{job.algorithm.value}_{job.alpha:g}_{job.beta:g}_run{job.rep}.csv"

    def run(job: _Job) -> _RunResult:
        inst = groups[job.instance][job.rep]
        start = time.perf_counter()
        try:
            config = SolverConfig(job.algorithm, job.alpha, job.beta, job.eps, plan.norm_rule, plan.max_iter)
            out = solve(inst.lp, inst.x0, config)
        except Exception as exc:  # recorded as a status row, never aborts the sweep
            out = SolveOutcome(Status.NUMERICAL_FAILURE, message=str(exc))
        elapsed = time.perf_counter() - start
        write_trace(trace_path(job), out.trace)
        return _RunResult(out.status, out.iterations, elapsed, out.final_gap)

    jobs = [
        _Job(i, r, alg, alpha, beta, eps)
        for i in range(len(groups))
        for (alg, alpha, beta, eps) in configs
        for r in range(plan.repetitions)
    ]
    workers = _thread_cap()
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(run, jobs))

    by_key: dict[tuple, list[_RunResult]] = {}
    for job, res in zip(jobs, results):
        by_key.setdefault((job.instance, job.algorithm, job.alpha, job.beta, job.eps), []).append(res)

    with open(plan.out_dir / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for (i, alg, alpha, beta, eps), runs in by_key.items():
            lp = groups[i][0].lp
            statuses = sorted({r.status.value for r in runs})
            writer.writerow([
                names[i], lp.num_rows, lp.num_cols, alg.value, f"{alpha:g}", f"{beta:g}", f"{eps:g}",
                len(runs),
                _fmt(statistics.median(r.iterations for r in runs)),
                _fmt(statistics.fmean(r.seconds for r in runs)),
                _fmt(statistics.median(r.final_gap for r in runs)),
                ";".join(statuses),
            ])
    print(f"wrote {len(by_key)} summary rows and {len(jobs)} traces to {plan.out_dir}")
    return 0


def _thread_cap() -> int:
    default = os.cpu_count() or 1
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise UsageError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return value


def _pair(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ALPHA,BETA, got {text!r}") from None
    return a, b


def plan_from_args(args: argparse.Namespace) -> BenchmarkPlan:
    specs = []
    for m, n, seed in args.random or []:
        try:
            specs.append(RandomLpSpec(m, n, seed))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    return BenchmarkPlan(
        random_specs=specs,
        mps_paths=[Path(p) for p in args.mps or []],
        algorithms=[Algorithm(a) for a in args.algorithms],
        pairs=args.pairs or list(DEFAULT_PAIRS),
        epsilons=args.eps,
        repetitions=args.reps,
        out_dir=Path(args.out),
        norm_rule=args.norm,
        max_iter=args.max_iter,
    )


# --------------------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dikin-accel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="solve one LP")
    p.add_argument("--mps", metavar="PATH", help="MPS file to solve (Phase-I start)")
    p.add_argument("--random", nargs=3, type=int, metavar=("M", "N", "SEED"),
                   help="seeded dense Gaussian instance")
    p.add_argument("--algorithm", choices=[a.value for a in Algorithm], default="gafs")
    p.add_argument("--alpha", type=float, default=0.55)
    p.add_argument("--beta", type=float, default=None, help="default 0.1, or 0 for afs")
    p.add_argument("--eps", type=float, default=1e-7)
    p.add_argument("--max-iter", type=int, default=10000)
    p.add_argument("--norm", choices=["gamma", "l2"], default="gamma")
    p.add_argument("--trace", metavar="PATH", help="write per-iteration CSV")
    p.add_argument("--clamp-inf", type=float, metavar="VALUE", nargs="?", const=1e9, default=None,
                   help="replace |b|, |c| entries at or above VALUE (default 1e9) by VALUE")
    p.add_argument("--no-enforce-q", action="store_true",
                   help="allow (alpha, beta) outside the admissible region")

    b = sub.add_parser("bench", help="benchmark sweep writing summary and trace CSVs")
    b.add_argument("--random", nargs=3, type=int, action="append", metavar=("M", "N", "SEED"))
    b.add_argument("--mps", action="append", metavar="PATH")
    b.add_argument("--algorithms", nargs="+", choices=[a.value for a in Algorithm],
                   default=[a.value for a in Algorithm])
    b.add_argument("--pairs", nargs="+", type=_pair, metavar="ALPHA,BETA")
    b.add_argument("--eps", nargs="+", type=float, default=[1e-4])
    b.add_argument("--reps", type=int, default=15)
    b.add_argument("--out", default="bench_out")
    b.add_argument("--norm", choices=["gamma", "l2"], default="gamma")
    b.add_argument("--max-iter", type=int, default=10000)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve":
            return cmd_solve(args)
        return cmd_bench(plan_from_args(args))
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"dikin-accel: error: {exc}", file=sys.stderr)
        return 1
    except (OSError, MpsError, InfeasibleBounds) as exc:
        print(f"dikin-accel: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
