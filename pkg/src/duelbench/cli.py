"""Command-line interface for running and inspecting experiments."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .core import ConfigurationError, ContractViolation
from .envs import load_matrix_file
from .gamesolver import SolverError, von_neumann_winner
from .harness import EXPERIMENTS, aggregate, run_experiment, verify_lemma


def _cmd_run(args) -> int:
    if args.experiment not in EXPERIMENTS:
        known = ", ".join(sorted(EXPERIMENTS))
        print(f"unknown experiment {args.experiment!r}; choose one of: "
              f"{known}", file=sys.stderr)
        return 1
    spec = EXPERIMENTS[args.experiment]
    if args.horizon:
        spec = replace(spec, horizons=tuple(args.horizon))
    if args.iterations is not None:
        spec = replace(spec, iterations=args.iterations)
    try:
        summary = run_experiment(spec, master_seed=args.seed,
                                 out_dir=args.out, workers=args.workers,
                                 dataset_file=args.dataset_file)
    except (ConfigurationError, ContractViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for warning in summary.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    for path in summary.files:
        print(path)
    for family, horizon, algorithm, iteration, error in summary.failed_cells:
        print(f"failed cell {family} T={horizon} {algorithm} "
              f"iteration {iteration}: {error}", file=sys.stderr)
    return 0 if summary.ok else 1


def _cmd_aggregate(args) -> int:
    rows = aggregate(args.in_dir, args.out)
    print(f"{args.out}: {rows} aggregated rows")
    return 0


def _cmd_verify_lemma(args) -> int:
    report = verify_lemma(args.n_max, grid_points=args.grid_points,
                          random_trials=args.random_trials, seed=args.seed)
    for n, found, bound in report.per_n:
        print(f"n={n}: max found {found:.6f} <= bound {bound:.1f}")
    witness = np.array2string(report.max_witness, precision=4)
    print(f"maximum {report.max_value:.6f} at n={report.max_n}, "
          f"witness {witness}")
    if not report.holds:
        n, x, value = report.counterexample
        print(f"BOUND VIOLATED at n={n}: value {value!r} for x={x!r}",
              file=sys.stderr)
        return 1
    print("bound holds")
    return 0


def _cmd_solve(args) -> int:
    matrix = load_matrix_file(args.matrix)
    try:
        strategy, value = von_neumann_winner(matrix, tol=args.tol)
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"game value: {value:.9f}")
    for arm, weight in enumerate(strategy.probs, start=1):
        print(f"arm {arm}: {weight:.9f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="duelbench",
        description="Duelling-bandit experiment runner and tools")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment family")
    run.add_argument("--experiment", required=True,
                     help=f"one of: {', '.join(sorted(EXPERIMENTS))}")
    run.add_argument("--horizon", type=int, action="append",
                     help="override horizon T (repeatable)")
    run.add_argument("--iterations", type=int,
                     help="override the number of repetitions")
    run.add_argument("--seed", type=int, required=True, help="master seed")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--workers", type=int, default=1,
                     help="parallel worker processes")
    run.add_argument("--dataset-file",
                     help="matrix file for the external sushi16 dataset")
    run.set_defaults(fn=_cmd_run)

    agg = sub.add_parser("aggregate",
                         help="mean/std regret per algorithm and checkpoint")
    agg.add_argument("--in", dest="in_dir", required=True,
                     help="directory holding run CSVs")
    agg.add_argument("--out", required=True, help="aggregated CSV path")
    agg.set_defaults(fn=_cmd_aggregate)

    lemma = sub.add_parser("verify-lemma",
                           help="brute-force the pairwise-square bound")
    lemma.add_argument("--n-max", type=int, required=True)
    lemma.add_argument("--grid-points", type=int, default=5)
    lemma.add_argument("--random-trials", type=int, default=10_000)
    lemma.add_argument("--seed", type=int, default=0)
    lemma.set_defaults(fn=_cmd_verify_lemma)

    solve = sub.add_parser("solve",
                           help="equilibrium strategy of a matrix game")
    solve.add_argument("--matrix", required=True,
                       help="matrix file: K, then K*K row-major entries")
    solve.add_argument("--tol", type=float, default=1e-6)
    solve.set_defaults(fn=_cmd_solve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigurationError, ContractViolation, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
