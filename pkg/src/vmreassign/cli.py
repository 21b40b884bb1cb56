"""The ``vmreassign`` command line."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from vmreassign.exact_solver import export_lp
from vmreassign.harness import MODES, ExperimentConfig, compare, run
from vmreassign.instance import InstanceError, generate_synthetic, load_instance, write_instance
from vmreassign.metaheuristic import MetaConfig
from vmreassign.objectives import spread_vectors

EXIT_USAGE = 2


def _experiment_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--instance", required=True, help="instance file (.vmr)")
    p.add_argument("--gap", type=float, default=0.05, help="relative optimality gap, e.g. 0.05 for 5%%")
    p.add_argument("--vectors", type=int, default=3, help="number of spread weight vectors")
    p.add_argument("--budget", type=float, default=None, help="seconds; defaults to the instance TIME_BUDGET")
    p.add_argument("--runs", type=int, default=10, help="repetitions of stochastic modes")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output directory for report.csv, fronts and config.echo")
    p.add_argument("--single-thread", action="store_true", help="run repetitions serially (fully deterministic)")
    p.add_argument("--node-limit", type=int, default=None, help="cap on branch-and-bound nodes per vector")
    p.add_argument("--best-only", action="store_true", help="pool only successive incumbents, not every feasible leaf")


def _config(args, mode: str) -> ExperimentConfig:
    return ExperimentConfig(
        instance_path=args.instance,
        mode=mode,
        gap=args.gap,
        k_vectors=args.vectors,
        meta=MetaConfig(seed=args.seed),
        budget_s=args.budget,
        runs=args.runs,
        out_dir=args.out,
        single_thread=args.single_thread,
        node_limit=args.node_limit,
        pool_all_feasible=not args.best_only,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vmreassign", description="Multi-objective VM reassignment experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment mode")
    _experiment_args(p)
    p.add_argument("--mode", choices=MODES, default="hybrid")

    p = sub.add_parser("compare", help="run several modes against one shared reference point")
    _experiment_args(p)
    p.add_argument("--modes", default="exact,meta,hybrid", help="comma-separated modes")

    p = sub.add_parser("export-lp", help="write the weighted-sum MILP in LP format")
    p.add_argument("--instance", required=True)
    p.add_argument("--vector", type=int, default=1, help="1-based index into the spread weight vectors")
    p.add_argument("--out", default="-", help="output file, '-' for stdout")

    p = sub.add_parser("generate", help="write a synthetic instance")
    p.add_argument("--machines", type=int, required=True)
    p.add_argument("--vms", type=int, required=True)
    p.add_argument("--services", type=int, required=True)
    p.add_argument("--resources", type=int, default=2)
    p.add_argument("--locations", type=int, default=2)
    p.add_argument("--neighborhoods", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=float, default=30.0)
    p.add_argument("--name", default=None)
    p.add_argument("--out", default="-")
    return parser


def _emit(text: str, out: str) -> None:
    if out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "run":
            report = run(_config(args, args.mode))
            sys.stdout.write(report.format_table())
        elif args.command == "compare":
            modes = [m.strip() for m in args.modes.split(",") if m.strip()]
            base = _config(args, modes[0] if modes else "exact")
            report = compare([replace(base, mode=m) for m in modes])
            sys.stdout.write(report.format_table())
        elif args.command == "export-lp":
            inst = load_instance(args.instance)
            vectors = spread_vectors(7)
            if not 1 <= args.vector <= len(vectors):
                raise ValueError(f"--vector must be in 1..{len(vectors)}")
            _emit(export_lp(inst, vectors[args.vector - 1]), args.out)
        elif args.command == "generate":
            inst = generate_synthetic(
                args.machines, args.vms, args.services, args.resources, args.locations, args.neighborhoods,
                seed=args.seed, time_budget_s=args.budget, name=args.name,
            )
            _emit(write_instance(inst), args.out)
    except (InstanceError, ValueError, OSError) as exc:
        print(f"vmreassign: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
