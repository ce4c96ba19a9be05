"""Command line interface.

Subcommands map one-to-one onto the benchmark experiments plus store
tooling. Settings come from an optional JSON config file; every flag
overrides the matching config key. Exit codes: 0 success, 2 bad
configuration or usage, 3 data/integrity failure, 4 numerical failure.
"""

import argparse
import json
import sys
from typing import List, Optional

import numpy as np

from .bench import (
    ExperimentConfig,
    config_from_dict,
    run_distance_study,
    run_estimator_bench,
    run_single_optimize,
    run_tree_bench,
    run_warm_start_bench,
    write_distance_study,
    write_paired_bench,
    write_single_optimize,
    write_tree_bench,
)
from .errors import ConfigError, IntegrityError, NumericalFailure, SchemaError
from .objective import QECounter, cost
from .store import load_store

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

COMMAND_EXPERIMENTS = {
    "optimize": "single_optimize",
    "warm-bench": "warm_start_bench",
    "est-bench": "estimator_bench",
    "tree-bench": "tree_bench",
    "dist-study": "distance_study",
}


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="JSON config file")
    parser.add_argument("--seed", type=int, metavar="N", help="master seed")
    parser.add_argument("--out", metavar="DIR", help="output directory")
    parser.add_argument(
        "--n", metavar="LIST", help="comma-separated qubit counts, e.g. 2,3"
    )
    parser.add_argument("--ka", type=int, metavar="N", help="pre-optimized set size")
    parser.add_argument("--kb", type=int, metavar="N", help="evaluation target count")
    parser.add_argument("--max-iter", type=int, metavar="N", help="iteration cap")
    parser.add_argument("--tau", type=float, metavar="F", help="convergence threshold")
    parser.add_argument(
        "--optimizer", choices=("gd", "adam"), help="update rule"
    )
    parser.add_argument("--lr", type=float, metavar="F", help="learning rate")
    parser.add_argument(
        "--candidates", type=int, metavar="N", help="estimator screening width"
    )
    parser.add_argument("--depth", type=int, metavar="N", help="tree depth")
    parser.add_argument("--branching", type=int, metavar="N", help="tree branching")
    parser.add_argument("--trials", type=int, metavar="N", help="study trials")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mtqo",
        description="Multi-target quantum circuit optimization benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "optimize": "cold-optimize a single random target",
        "warm-bench": "warm-start arm vs paired cold arm",
        "est-bench": "sequential parameter-estimator protocol vs cold arm",
        "tree-bench": "tree flooding vs independent cold starts",
        "dist-study": "expected nearest-neighbor distance study",
    }
    for name in COMMAND_EXPERIMENTS:
        sp = sub.add_parser(name, help=helps[name])
        _add_run_flags(sp)
    store = sub.add_parser("store", help="store file tooling")
    store_sub = store.add_subparsers(dest="store_command", required=True)
    inspect = store_sub.add_parser(
        "inspect", help="validate a store file and print a summary"
    )
    inspect.add_argument("path", help="store JSON file")
    inspect.add_argument(
        "--recheck-costs",
        action="store_true",
        help="re-evaluate every stored cost against its parameters",
    )
    return parser


def _parse_n_values(text: str):
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ConfigError(f"bad --n value {text!r}, expected e.g. 2,3,4")


def resolve_config(args: argparse.Namespace, experiment: str) -> ExperimentConfig:
    """Config file (if any), then flag overrides, then validation."""
    if args.config is not None:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"config {args.config} is not valid JSON: {exc}"
            ) from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    else:
        data = {}
    data = dict(data)
    data["experiment"] = experiment

    top = {
        "master_seed": args.seed,
        "output_dir": args.out,
        "k_a": args.ka,
        "k_b": args.kb,
        "trials": args.trials,
    }
    if args.n is not None:
        top["n_values"] = _parse_n_values(args.n)
    for key, value in top.items():
        if value is not None:
            data[key] = value

    nested = {
        "optimizer": {
            "max_iterations": args.max_iter,
            "threshold_tau": args.tau,
            "rule": args.optimizer,
            "learning_rate": args.lr,
        },
        "strategy": {"candidate_count": args.candidates},
        "tree": {"depth": args.depth, "branching": args.branching},
    }
    for block, overrides in nested.items():
        live = {k: v for k, v in overrides.items() if v is not None}
        if live:
            merged = dict(data.get(block, {}))
            merged.update(live)
            data[block] = merged

    return config_from_dict(data)


def _print_summary(result) -> None:
    for s in result.summary:
        print(
            f"n={s.num_qubits} {s.arm}: runs={s.runs} "
            f"mean_iter={s.mean_n_iter:.2f} mean_cost={s.mean_final_cost:.2e} "
            f"converged={s.converged_runs}/{s.runs}"
        )


def _run_experiment(config: ExperimentConfig) -> None:
    if config.experiment == "warm_start_bench":
        result = run_warm_start_bench(config)
        write_paired_bench(result, config)
        _print_summary(result)
    elif config.experiment == "estimator_bench":
        result = run_estimator_bench(config)
        write_paired_bench(result, config)
        _print_summary(result)
    elif config.experiment == "tree_bench":
        results = run_tree_bench(config)
        write_tree_bench(results, config)
        for r in results:
            print(
                f"n={r.num_qubits} tree: total_iter={r.tree_total_iterations} "
                f"mean_cost={r.tree_mean_target_cost:.2e} | cold: "
                f"total_iter={r.cold_total_iterations} "
                f"mean_cost={r.cold_mean_cost:.2e}"
            )
    elif config.experiment == "distance_study":
        study = run_distance_study(config)
        write_distance_study(study, config)
        for row in study:
            print(
                f"n={row.num_qubits} K={row.store_size}: "
                f"mean_min_dist={row.mean_min_distance:.4f} "
                f"std={row.std_min_distance:.4f}"
            )
    elif config.experiment == "single_optimize":
        result = run_single_optimize(config)
        write_single_optimize(result, config)
        rec = result.record
        print(
            f"n={result.num_qubits} n_iter={rec.n_iter} "
            f"final_cost={rec.final_cost:.3e} converged={rec.converged} "
            f"qe_total={rec.qe_total}"
        )
    else:
        raise ConfigError(f"unknown experiment {config.experiment!r}")
    print(f"outputs written to {config.output_dir}")


def _store_inspect(args: argparse.Namespace) -> int:
    store = load_store(args.path)
    spec = store.ansatz
    costs = [e.final_cost for e in store.entries]
    kinds = {}
    for e in store.entries:
        kinds[e.provenance] = kinds.get(e.provenance, 0) + 1
    print(
        f"{args.path}: n={spec.num_qubits} L={spec.num_layers} "
        f"m={spec.param_count} entries={len(store)}"
    )
    if costs:
        print(
            f"final_cost mean={float(np.mean(costs)):.3e} "
            f"max={float(np.max(costs)):.3e}"
        )
        print("provenance:", ", ".join(
            f"{k}={v}" for k, v in sorted(kinds.items())
        ))
    if args.recheck_costs:
        worst = 0.0
        for i, e in enumerate(store.entries):
            fresh = cost(spec, e.theta_star, e.target, QECounter())
            worst = max(worst, abs(fresh - e.final_cost))
        print(f"cost recheck: max deviation {worst:.3e}")
        if worst > 1e-9:
            raise IntegrityError(
                f"{args.path}: stored costs deviate from re-evaluation by {worst:.3e}"
            )
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "store":
            return _store_inspect(args)
        config = resolve_config(args, COMMAND_EXPERIMENTS[args.command])
        _run_experiment(config)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SchemaError, IntegrityError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
