"""Command-line entry points: run, stats, evaluate."""

import argparse
import sys

from .datasets import compute_active_users, load_dataset
from .errors import ConfigurationError, PlanningError, PoibenchError
from .evaluation import ALL_METRICS, evaluate_run
from .runner import DEFAULT_SEED, execute, parse_config, plan_runs, read_lists_file

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_RUN_FAILED = 2


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="poibench",
        description="Benchmark context-aware point-of-interest recommenders",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute the experiments described by a config file")
    run.add_argument("--config", required=True, help="path to the key=value config file")
    run.add_argument("--workers", type=int, default=1, help="scoring worker threads")
    run.add_argument("--force", action="store_true", help="recompute existing outputs")
    run.add_argument("--seed", type=int, default=DEFAULT_SEED)

    stats = sub.add_parser("stats", help="print dataset statistics")
    stats.add_argument("--dataset", required=True)
    stats.add_argument("--data-dir", default="Data")

    ev = sub.add_parser("evaluate", help="re-evaluate an existing ranked-lists file")
    ev.add_argument("--lists", required=True)
    ev.add_argument("--dataset", required=True)
    ev.add_argument("--data-dir", default="Data")
    ev.add_argument("--top-k", type=int, default=10)
    ev.add_argument(
        "--metrics",
        default=",".join(ALL_METRICS),
        help="comma-separated metric names (default: all)",
    )
    ev.add_argument("--active-users-percentage", type=float, default=0.2)
    return parser


def _cmd_run(args):
    config = parse_config(args.config)
    plan = plan_runs(config)
    summary = execute(
        plan, config, workers=args.workers, force=args.force, seed=args.seed
    )
    for run in summary.skipped:
        print(f"skipped  {run.basename}")
    for run in summary.executed:
        print(f"executed {run.basename}")
    for run, message in summary.failed:
        print(f"FAILED   {run.basename}: {message}", file=sys.stderr)
    print(
        f"{len(summary.executed)} executed, {len(summary.skipped)} skipped, "
        f"{len(summary.failed)} failed"
    )
    return EXIT_OK if summary.ok else EXIT_RUN_FAILED


def _cmd_stats(args):
    from .datasets import dataset_stats

    bundle = load_dataset(args.data_dir, args.dataset)
    stats = dataset_stats(bundle)
    print(f"dataset      {args.dataset}")
    print(f"users        {stats.users}")
    print(f"POIs         {stats.pois}")
    print(f"check-ins    {stats.checkins}")
    print(f"social edges {stats.social_edges}")
    print(f"categories   {stats.categories}")
    print(f"density      {stats.density:.6f}")
    return EXIT_OK


def _cmd_evaluate(args):
    header, lists = read_lists_file(args.lists)
    bundle = load_dataset(args.data_dir, args.dataset)
    groups = compute_active_users(bundle, args.active_users_percentage)
    metrics = tuple(m.strip() for m in args.metrics.split(",") if m.strip())
    list_limit = int(header.get("listLimit", args.top_k))
    report = evaluate_run(
        lists, bundle, groups, metrics, args.top_k, list_limit, metadata=header
    )
    for key in sorted(report.values):
        print(f"{key}\t{report.values[key]!r}")
    for group, key in sorted(report.group_values):
        print(f"group:{group}:{key}\t{report.group_values[(group, key)]!r}")
    return EXIT_OK


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "stats":
            return _cmd_stats(args)
        return _cmd_evaluate(args)
    except (ConfigurationError, PlanningError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except PoibenchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUN_FAILED


if __name__ == "__main__":
    sys.exit(main())
