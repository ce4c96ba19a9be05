"""Benchmark harness: paired-arm transfer experiments and file outputs.

Every experiment derives all randomness from one master seed, so the
transfer arm and its cold control consume identical targets (and identical
fallback initializations) and reruns are byte-identical. Computation and
file writing are split: run_* functions return plain result objects,
write_* functions serialize them.
"""

import csv
import io
import json
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .ansatz import build_ansatz
from .errors import ConfigError
from .metrics import DistanceStudyRow, distance_study
from .optimizer import (
    OptimizationRecord,
    OptimizerConfig,
    optimize,
    random_parameters,
)
from .seeding import derive_seed
from .statevector import sample_random_state
from .store import OptimizedEntry, OptimizedStore, save_store
from .transfer import (
    TransferStrategy,
    estimator_optimize,
    warm_start_optimize,
)
from .tree import TreeConfig, TreeTraining, build_tree, train_tree

ARTIFACT_VERSION = "mtqo 0.1.0"
EXPERIMENTS = (
    "warm_start_bench",
    "estimator_bench",
    "tree_bench",
    "distance_study",
    "single_optimize",
)
ROWS_SCHEMA = "mtqo.rows.v1"
SUMMARY_SCHEMA = "mtqo.summary.v1"
DIST_STUDY_SCHEMA = "mtqo.dist_study.v1"
META_SCHEMA = "mtqo.meta.v1"
TREE_REPORT_SCHEMA = "mtqo.tree_report.v1"
RECORD_SCHEMA = "mtqo.record.v1"

DEFAULT_STORE_SIZES = (1, 2, 5, 10, 20, 50)


@dataclass
class ExperimentConfig:
    """One benchmark run: what to execute, at which sizes, from which seed.

    num_layers None means L = n (layers track the qubit count).
    """

    experiment: str = "warm_start_bench"
    n_values: Tuple[int, ...] = (2, 3)
    num_layers: Optional[int] = None
    k_a: int = 50
    k_b: int = 20
    master_seed: int = 1
    output_dir: str = "out"
    entangler_angle: float = float(np.pi)
    trials: int = 100
    store_sizes: Tuple[int, ...] = DEFAULT_STORE_SIZES
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    strategy: TransferStrategy = field(default_factory=TransferStrategy)
    tree: TreeConfig = field(default_factory=TreeConfig)

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        self.n_values = tuple(int(n) for n in self.n_values)
        if not self.n_values:
            raise ConfigError("n_values must be non-empty")
        for n in self.n_values:
            if n < 2:
                raise ConfigError(f"n must be >= 2, got {n}")
        if self.num_layers is not None and self.num_layers < 1:
            raise ConfigError(f"num_layers must be >= 1, got {self.num_layers}")
        if self.k_a < 1:
            raise ConfigError(f"k_a must be >= 1, got {self.k_a}")
        if self.k_b < 1:
            raise ConfigError(f"k_b must be >= 1, got {self.k_b}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        self.store_sizes = tuple(int(k) for k in self.store_sizes)
        if not self.store_sizes or any(k < 1 for k in self.store_sizes):
            raise ConfigError(f"bad store_sizes {self.store_sizes!r}")
        if not np.isfinite(self.entangler_angle):
            raise ConfigError("entangler_angle must be finite")

    def layers_for(self, num_qubits: int) -> int:
        if self.num_layers is None:
            return num_qubits
        return self.num_layers

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "n_values": list(self.n_values),
            "num_layers": self.num_layers,
            "k_a": self.k_a,
            "k_b": self.k_b,
            "master_seed": self.master_seed,
            "output_dir": self.output_dir,
            "entangler_angle": self.entangler_angle,
            "trials": self.trials,
            "store_sizes": list(self.store_sizes),
            "optimizer": {
                "rule": self.optimizer.rule,
                "learning_rate": self.optimizer.learning_rate,
                "beta1": self.optimizer.beta1,
                "beta2": self.optimizer.beta2,
                "epsilon": self.optimizer.epsilon,
                "threshold_tau": self.optimizer.threshold_tau,
                "max_iterations": self.optimizer.max_iterations,
            },
            "strategy": {
                "kind": self.strategy.kind,
                "candidate_count": self.strategy.candidate_count,
            },
            "tree": {
                "depth": self.tree.depth,
                "branching": self.tree.branching,
                "cluster_seed": self.tree.cluster_seed,
                "max_kmeans_iters": self.tree.max_kmeans_iters,
            },
        }


def config_from_dict(data: dict) -> ExperimentConfig:
    """Rebuild an ExperimentConfig from parsed JSON, rejecting unknown keys."""
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    known = {
        "experiment", "n_values", "num_layers", "k_a", "k_b", "master_seed",
        "output_dir", "entangler_angle", "trials", "store_sizes",
        "optimizer", "strategy", "tree",
    }
    extra = set(data) - known
    if extra:
        raise ConfigError(f"unknown config keys: {sorted(extra)}")

    def sub(key, allowed):
        block = data.get(key, {})
        if not isinstance(block, dict):
            raise ConfigError(f"config key {key!r} must be an object")
        bad = set(block) - set(allowed)
        if bad:
            raise ConfigError(f"unknown keys under {key!r}: {sorted(bad)}")
        return block

    try:
        opt = OptimizerConfig(**sub("optimizer", (
            "rule", "learning_rate", "beta1", "beta2", "epsilon",
            "threshold_tau", "max_iterations",
        )))
        strat = TransferStrategy(**sub("strategy", ("kind", "candidate_count")))
        tree = TreeConfig(**sub("tree", (
            "depth", "branching", "cluster_seed", "max_kmeans_iters",
        )))
        kwargs = {
            k: data[k]
            for k in known - {"optimizer", "strategy", "tree"}
            if k in data
        }
        return ExperimentConfig(
            optimizer=opt, strategy=strat, tree=tree, **kwargs
        )
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(data)


@dataclass
class BenchRow:
    num_qubits: int
    target_id: int
    arm: str                # store_build | transfer | control
    strategy_kind: str      # cold | warm_start | estimator
    n_iter: int
    final_cost: float
    qe_total: int
    converged: bool
    seed: int

    @classmethod
    def from_record(cls, n, target_id, arm, kind, record: OptimizationRecord):
        return cls(
            num_qubits=n,
            target_id=target_id,
            arm=arm,
            strategy_kind=kind,
            n_iter=record.n_iter,
            final_cost=record.final_cost,
            qe_total=record.qe_total,
            converged=record.converged,
            seed=record.seed,
        )


@dataclass
class SummaryRow:
    num_qubits: int
    arm: str
    runs: int
    mean_n_iter: float
    mean_final_cost: float
    mean_qe_total: float
    converged_runs: int


def summarize(rows: Sequence[BenchRow]) -> List[SummaryRow]:
    """Per (n, arm) arithmetic means over the emitted rows."""
    out = []
    keys = sorted({(r.num_qubits, r.arm) for r in rows})
    for n, arm in keys:
        grp = [r for r in rows if r.num_qubits == n and r.arm == arm]
        out.append(SummaryRow(
            num_qubits=n,
            arm=arm,
            runs=len(grp),
            mean_n_iter=float(np.mean([r.n_iter for r in grp])),
            mean_final_cost=float(np.mean([r.final_cost for r in grp])),
            mean_qe_total=float(np.mean([r.qe_total for r in grp])),
            converged_runs=sum(r.converged for r in grp),
        ))
    return out


def _build_store(config: ExperimentConfig, n: int) -> Tuple[OptimizedStore, List[BenchRow]]:
    """Cold-optimize k_a random targets into a fresh store."""
    spec = build_ansatz(n, config.layers_for(n), config.entangler_angle)
    store = OptimizedStore(ansatz=spec)
    rows = []
    for i in range(config.k_a):
        target = sample_random_state(
            n, derive_seed(config.master_seed, "A-target", n, i)
        )
        init_seed = derive_seed(config.master_seed, "A-init", n, i)
        record = optimize(
            spec,
            random_parameters(spec.param_count, init_seed),
            target,
            config.optimizer,
            seed=init_seed,
            init_provenance="cold",
        )
        store.append(OptimizedEntry(
            target=target,
            theta_star=record.final_theta,
            final_cost=record.final_cost,
            record_ref=f"A-n{n}-{i}",
            seed=init_seed,
            provenance="cold",
        ))
        rows.append(BenchRow.from_record(n, i, "store_build", "cold", record))
    return store, rows


@dataclass
class PairedBenchResult:
    rows: List[BenchRow]
    summary: List[SummaryRow]
    stores: Dict[int, OptimizedStore]


def run_warm_start_bench(config: ExperimentConfig) -> PairedBenchResult:
    """Warm-start arm vs paired cold arm over k_b fresh targets per n."""
    rows: List[BenchRow] = []
    stores: Dict[int, OptimizedStore] = {}
    for n in config.n_values:
        store, build_rows = _build_store(config, n)
        stores[n] = store
        rows.extend(build_rows)
        spec = store.ansatz
        for i in range(config.k_b):
            y = sample_random_state(
                n, derive_seed(config.master_seed, "B-target", n, i)
            )
            init_seed = derive_seed(config.master_seed, "B-init", n, i)
            warm = warm_start_optimize(
                y, store, config.optimizer, seed=init_seed
            )
            cold = optimize(
                spec,
                random_parameters(spec.param_count, init_seed),
                y,
                config.optimizer,
                seed=init_seed,
                init_provenance="cold",
            )
            rows.append(BenchRow.from_record(n, i, "transfer", "warm_start", warm))
            rows.append(BenchRow.from_record(n, i, "control", "cold", cold))
    paired = [r for r in rows if r.arm != "store_build"]
    return PairedBenchResult(rows=rows, summary=summarize(paired), stores=stores)


def run_estimator_bench(config: ExperimentConfig) -> PairedBenchResult:
    """Sequential protocol: B drains into A, first target cold, rest estimated.

    The control arm re-optimizes every target from the same seeded cold
    initialization the transfer arm would have used, so the two arms differ
    only in strategy.
    """
    if config.k_b < 2:
        raise ConfigError(f"estimator bench needs k_b >= 2, got {config.k_b}")
    rows: List[BenchRow] = []
    stores: Dict[int, OptimizedStore] = {}
    for n in config.n_values:
        spec = build_ansatz(n, config.layers_for(n), config.entangler_angle)
        store = OptimizedStore(ansatz=spec)
        stores[n] = store
        for i in range(config.k_b):
            y = sample_random_state(
                n, derive_seed(config.master_seed, "B-target", n, i)
            )
            init_seed = derive_seed(config.master_seed, "B-init", n, i)
            cold = optimize(
                spec,
                random_parameters(spec.param_count, init_seed),
                y,
                config.optimizer,
                seed=init_seed,
                init_provenance="cold",
            )
            if len(store) == 0:
                est, kind = cold, "cold"
            else:
                clipped = TransferStrategy(
                    kind="estimator",
                    candidate_count=min(
                        config.strategy.candidate_count, len(store)
                    ),
                )
                est = estimator_optimize(
                    y, store, clipped, config.optimizer, seed=init_seed
                )
                kind = "estimator"
            store.append(OptimizedEntry(
                target=y,
                theta_star=est.final_theta,
                final_cost=est.final_cost,
                record_ref=f"B-n{n}-{i}",
                seed=init_seed,
                provenance=est.init_provenance,
            ))
            rows.append(BenchRow.from_record(n, i, "transfer", kind, est))
            rows.append(BenchRow.from_record(n, i, "control", "cold", cold))
    return PairedBenchResult(rows=rows, summary=summarize(rows), stores=stores)


@dataclass
class TreeBenchResult:
    num_qubits: int
    training: TreeTraining
    cold_records: List[OptimizationRecord]
    tree_total_iterations: int
    cold_total_iterations: int
    tree_total_qe: int
    cold_total_qe: int
    tree_mean_target_cost: float
    cold_mean_cost: float


def run_tree_bench(config: ExperimentConfig) -> List[TreeBenchResult]:
    """Flood a tree over k_b targets vs k_b independent cold starts."""
    if config.k_b < 2:
        raise ConfigError(f"tree bench needs k_b >= 2, got {config.k_b}")
    results = []
    for n in config.n_values:
        spec = build_ansatz(n, config.layers_for(n), config.entangler_angle)
        targets = [
            sample_random_state(
                n, derive_seed(config.master_seed, "B-target", n, i)
            )
            for i in range(config.k_b)
        ]
        tree_cfg = TreeConfig(
            depth=config.tree.depth,
            branching=config.tree.branching,
            cluster_seed=derive_seed(config.master_seed, "tree-cluster", n),
            max_kmeans_iters=config.tree.max_kmeans_iters,
        )
        root = build_tree(targets, tree_cfg)
        training = train_tree(
            root, targets, spec, config.optimizer, seed=config.master_seed
        )
        cold_records = []
        for i, y in enumerate(targets):
            init_seed = derive_seed(config.master_seed, "B-init", n, i)
            cold_records.append(optimize(
                spec,
                random_parameters(spec.param_count, init_seed),
                y,
                config.optimizer,
                seed=init_seed,
                init_provenance="cold",
            ))
        target_costs = [
            training.target_records[i].final_cost for i in range(config.k_b)
        ]
        results.append(TreeBenchResult(
            num_qubits=n,
            training=training,
            cold_records=cold_records,
            tree_total_iterations=training.total_iterations(),
            cold_total_iterations=sum(r.n_iter for r in cold_records),
            tree_total_qe=training.total_qe(),
            cold_total_qe=sum(r.qe_total for r in cold_records),
            tree_mean_target_cost=float(np.mean(target_costs)),
            cold_mean_cost=float(np.mean(
                [r.final_cost for r in cold_records]
            )),
        ))
    return results


def run_distance_study(config: ExperimentConfig) -> List[DistanceStudyRow]:
    return distance_study(
        config.n_values,
        config.store_sizes,
        config.trials,
        config.master_seed,
    )


@dataclass
class SingleOptimizeResult:
    num_qubits: int
    record: OptimizationRecord


def run_single_optimize(config: ExperimentConfig) -> SingleOptimizeResult:
    """Cold-optimize one random target at the first requested n."""
    n = config.n_values[0]
    spec = build_ansatz(n, config.layers_for(n), config.entangler_angle)
    target = sample_random_state(
        n, derive_seed(config.master_seed, "B-target", n, 0)
    )
    init_seed = derive_seed(config.master_seed, "B-init", n, 0)
    record = optimize(
        spec,
        random_parameters(spec.param_count, init_seed),
        target,
        config.optimizer,
        seed=init_seed,
        init_provenance="cold",
    )
    return SingleOptimizeResult(num_qubits=n, record=record)


def _atomic_write_text(path: str, text: str) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _csv_text(schema: str, header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(f"# schema: {schema}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _cell(value):
    """repr floats so CSV bytes round-trip the exact double."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return value


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def write_meta(config: ExperimentConfig, out_dir: str) -> None:
    meta = {
        "schema": META_SCHEMA,
        "artifact": ARTIFACT_VERSION,
        "master_seed": config.master_seed,
        "config": config.to_dict(),
    }
    _atomic_write_text(os.path.join(out_dir, "meta.json"), _json_text(meta))


ROWS_HEADER = (
    "n", "target_id", "arm", "strategy_kind", "n_iter",
    "final_cost", "qe_total", "converged", "seed",
)
SUMMARY_HEADER = (
    "n", "arm", "runs", "mean_n_iter", "mean_final_cost",
    "mean_qe_total", "converged_runs",
)


def write_paired_bench(result: PairedBenchResult, config: ExperimentConfig) -> None:
    out = config.output_dir
    os.makedirs(out, exist_ok=True)
    rows = sorted(
        result.rows,
        key=lambda r: (r.num_qubits, r.target_id, r.arm, r.strategy_kind),
    )
    _atomic_write_text(
        os.path.join(out, "rows.csv"),
        _csv_text(ROWS_SCHEMA, ROWS_HEADER, [
            (r.num_qubits, r.target_id, r.arm, r.strategy_kind, r.n_iter,
             r.final_cost, r.qe_total, r.converged, r.seed)
            for r in rows
        ]),
    )
    _atomic_write_text(
        os.path.join(out, "summary.csv"),
        _csv_text(SUMMARY_SCHEMA, SUMMARY_HEADER, [
            (s.num_qubits, s.arm, s.runs, s.mean_n_iter, s.mean_final_cost,
             s.mean_qe_total, s.converged_runs)
            for s in result.summary
        ]),
    )
    for n, store in result.stores.items():
        save_store(store, os.path.join(out, f"store_n{n}.json"))
    write_meta(config, out)


def _record_dict(record: OptimizationRecord) -> dict:
    return {
        "final_theta": [float(v) for v in record.final_theta],
        "final_cost": float(record.final_cost),
        "n_iter": record.n_iter,
        "cost_trace": [float(v) for v in record.cost_trace],
        "qe_total": record.qe_total,
        "converged": bool(record.converged),
        "init_provenance": record.init_provenance,
        "seed": record.seed,
    }


def _tree_node_dict(node) -> dict:
    data = {
        "node_id": node.node_id,
        "level": node.level,
        "leaf_targets": list(node.leaf_targets),
        "children": [_tree_node_dict(c) for c in node.children],
    }
    if node.optimized is not None:
        data["n_iter"] = node.optimized.n_iter
        data["final_cost"] = float(node.optimized.final_cost)
        data["converged"] = bool(node.optimized.converged)
    return data


def write_tree_bench(
    results: List[TreeBenchResult], config: ExperimentConfig
) -> None:
    out = config.output_dir
    os.makedirs(out, exist_ok=True)
    report = {"schema": TREE_REPORT_SCHEMA, "runs": []}
    for res in results:
        report["runs"].append({
            "n": res.num_qubits,
            "tree_total_iterations": res.tree_total_iterations,
            "cold_total_iterations": res.cold_total_iterations,
            "tree_total_qe": res.tree_total_qe,
            "cold_total_qe": res.cold_total_qe,
            "tree_mean_target_cost": res.tree_mean_target_cost,
            "cold_mean_cost": res.cold_mean_cost,
            "audit": res.training.audit,
            "tree": _tree_node_dict(res.training.root),
            "node_records": {
                str(k): _record_dict(v)
                for k, v in sorted(res.training.node_records.items())
            },
            "target_records": {
                str(k): _record_dict(v)
                for k, v in sorted(res.training.target_records.items())
            },
            "cold_records": [_record_dict(r) for r in res.cold_records],
        })
    _atomic_write_text(
        os.path.join(out, "tree_report.json"), _json_text(report)
    )
    write_meta(config, out)


DIST_STUDY_HEADER = ("n", "K", "trials", "mean", "std", "seed")


def write_distance_study(
    study: List[DistanceStudyRow], config: ExperimentConfig
) -> None:
    out = config.output_dir
    os.makedirs(out, exist_ok=True)
    _atomic_write_text(
        os.path.join(out, "dist_study.csv"),
        _csv_text(DIST_STUDY_SCHEMA, DIST_STUDY_HEADER, [
            (r.num_qubits, r.store_size, r.trials, r.mean_min_distance,
             r.std_min_distance, config.master_seed)
            for r in study
        ]),
    )
    write_meta(config, out)


def write_single_optimize(
    result: SingleOptimizeResult, config: ExperimentConfig
) -> None:
    out = config.output_dir
    os.makedirs(out, exist_ok=True)
    payload = {
        "schema": RECORD_SCHEMA,
        "n": result.num_qubits,
        "record": _record_dict(result.record),
    }
    _atomic_write_text(os.path.join(out, "record.json"), _json_text(payload))
    write_meta(config, out)
