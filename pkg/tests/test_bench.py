"""Benchmark harness: protocols, summaries, writers, reproducibility."""

import csv
import json
import os

import numpy as np
import pytest

from mtqo.bench import (
    ExperimentConfig,
    config_from_dict,
    load_config,
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
from mtqo.errors import ConfigError
from mtqo.optimizer import OptimizerConfig
from mtqo.store import load_store
from mtqo.tree import TreeConfig

FAST_OPT = dict(max_iterations=60)


def _warm_config(**overrides):
    base = dict(
        experiment="warm_start_bench",
        n_values=(2,),
        k_a=5,
        k_b=3,
        master_seed=21,
        optimizer=OptimizerConfig(**FAST_OPT),
    )
    base.update(overrides)
    return ExperimentConfig(**base)


def test_config_validation():
    with pytest.raises(ConfigError):
        ExperimentConfig(experiment="nope")
    with pytest.raises(ConfigError):
        ExperimentConfig(n_values=())
    with pytest.raises(ConfigError):
        ExperimentConfig(n_values=(1,))
    with pytest.raises(ConfigError):
        ExperimentConfig(k_a=0)
    with pytest.raises(ConfigError):
        ExperimentConfig(store_sizes=(0,))


def test_layers_rule():
    assert ExperimentConfig().layers_for(4) == 4
    assert ExperimentConfig(num_layers=2).layers_for(4) == 2


def test_config_round_trip():
    cfg = _warm_config()
    data = json.loads(json.dumps(cfg.to_dict()))
    back = config_from_dict(data)
    assert back.to_dict() == cfg.to_dict()


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        config_from_dict({"experiment": "warm_start_bench", "typo": 1})
    with pytest.raises(ConfigError):
        config_from_dict({"optimizer": {"learning_rte": 0.1}})


def test_load_config(tmp_path):
    path = str(tmp_path / "cfg.json")
    json.dump({"experiment": "distance_study", "trials": 7}, open(path, "w"))
    cfg = load_config(path)
    assert cfg.experiment == "distance_study"
    assert cfg.trials == 7
    open(path, "w").write("{broken")
    with pytest.raises(ConfigError):
        load_config(path)
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))


def test_warm_bench_pairing_and_summary():
    cfg = _warm_config()
    res = run_warm_start_bench(cfg)

    build = [r for r in res.rows if r.arm == "store_build"]
    transfer = [r for r in res.rows if r.arm == "transfer"]
    control = [r for r in res.rows if r.arm == "control"]
    assert len(build) == 5
    assert len(transfer) == len(control) == 3
    assert [r.target_id for r in transfer] == [r.target_id for r in control]
    assert all(r.strategy_kind == "warm_start" for r in transfer)
    assert all(r.strategy_kind == "cold" for r in control)
    # paired seeds: the transfer and control rows share the fallback seed
    assert [r.seed for r in transfer] == [r.seed for r in control]
    assert len(res.stores[2]) == 5

    for arm in ("transfer", "control"):
        rows = [r for r in res.rows if r.arm == arm]
        summ = [s for s in res.summary if s.arm == arm][0]
        assert summ.runs == len(rows)
        assert summ.mean_n_iter == pytest.approx(
            np.mean([r.n_iter for r in rows])
        )
        assert summ.mean_final_cost == pytest.approx(
            np.mean([r.final_cost for r in rows])
        )
        assert summ.converged_runs == sum(r.converged for r in rows)


def test_estimator_bench_sequential():
    cfg = ExperimentConfig(
        experiment="estimator_bench", n_values=(2,), k_b=4, master_seed=22,
        optimizer=OptimizerConfig(**FAST_OPT),
    )
    res = run_estimator_bench(cfg)
    transfer = [r for r in res.rows if r.arm == "transfer"]
    assert transfer[0].strategy_kind == "cold"
    assert all(r.strategy_kind == "estimator" for r in transfer[1:])
    assert len(res.stores[2]) == 4
    control = [r for r in res.rows if r.arm == "control"]
    assert len(control) == 4
    # first pair is the identical run in both arms
    assert transfer[0].n_iter == control[0].n_iter
    assert transfer[0].final_cost == control[0].final_cost


def test_estimator_bench_needs_two_targets():
    with pytest.raises(ConfigError):
        run_estimator_bench(
            ExperimentConfig(experiment="estimator_bench", n_values=(2,), k_b=1)
        )


def test_tree_bench_totals():
    cfg = ExperimentConfig(
        experiment="tree_bench", n_values=(2,), k_b=5, master_seed=23,
        optimizer=OptimizerConfig(**FAST_OPT),
        tree=TreeConfig(depth=1, branching=2),
    )
    res = run_tree_bench(cfg)
    assert len(res) == 1
    r = res[0]
    assert r.tree_total_iterations == r.training.total_iterations()
    assert r.cold_total_iterations == sum(c.n_iter for c in r.cold_records)
    assert len(r.cold_records) == 5
    assert len(r.training.target_records) == 5


def test_paired_bench_files(tmp_path):
    cfg = _warm_config(output_dir=str(tmp_path / "out"))
    res = run_warm_start_bench(cfg)
    write_paired_bench(res, cfg)
    out = cfg.output_dir
    names = sorted(os.listdir(out))
    assert names == ["meta.json", "rows.csv", "store_n2.json", "summary.csv"]

    lines = open(os.path.join(out, "rows.csv")).read().splitlines()
    assert lines[0] == "# schema: mtqo.rows.v1"
    reader = csv.DictReader(lines[1:])
    parsed = list(reader)
    assert len(parsed) == len(res.rows)
    # float cells round-trip the exact double
    by_key = {
        (int(p["target_id"]), p["arm"]): float(p["final_cost"]) for p in parsed
    }
    for row in res.rows:
        assert by_key[(row.target_id, row.arm)] == row.final_cost

    meta = json.load(open(os.path.join(out, "meta.json")))
    assert meta["master_seed"] == 21
    assert meta["config"] == cfg.to_dict()
    assert "timestamp" not in json.dumps(meta).lower()

    store = load_store(os.path.join(out, "store_n2.json"))
    assert len(store) == 5


def test_summary_recomputable_from_rows(tmp_path):
    cfg = _warm_config(output_dir=str(tmp_path / "out"))
    write_paired_bench(run_warm_start_bench(cfg), cfg)
    out = cfg.output_dir
    rows = list(csv.DictReader(
        open(os.path.join(out, "rows.csv")).read().splitlines()[1:]
    ))
    summ = list(csv.DictReader(
        open(os.path.join(out, "summary.csv")).read().splitlines()[1:]
    ))
    for s in summ:
        grp = [r for r in rows if r["arm"] == s["arm"] and r["n"] == s["n"]]
        assert int(s["runs"]) == len(grp)
        assert float(s["mean_n_iter"]) == pytest.approx(
            np.mean([int(r["n_iter"]) for r in grp])
        )


def test_rerun_byte_identical(tmp_path):
    cfg1 = _warm_config(output_dir=str(tmp_path / "o1"))
    cfg2 = _warm_config(output_dir=str(tmp_path / "o2"))
    write_paired_bench(run_warm_start_bench(cfg1), cfg1)
    write_paired_bench(run_warm_start_bench(cfg2), cfg2)
    for name in ("rows.csv", "summary.csv", "store_n2.json"):
        b1 = open(os.path.join(cfg1.output_dir, name), "rb").read()
        b2 = open(os.path.join(cfg2.output_dir, name), "rb").read()
        assert b1 == b2, name


def test_tree_report_file(tmp_path):
    cfg = ExperimentConfig(
        experiment="tree_bench", n_values=(2,), k_b=4, master_seed=24,
        output_dir=str(tmp_path / "out"),
        optimizer=OptimizerConfig(**FAST_OPT),
        tree=TreeConfig(depth=1, branching=2),
    )
    write_tree_bench(run_tree_bench(cfg), cfg)
    report = json.load(open(os.path.join(cfg.output_dir, "tree_report.json")))
    run = report["runs"][0]
    assert run["n"] == 2
    assert run["audit"][0]["parent"] is None
    assert len(run["cold_records"]) == 4
    assert run["tree_total_iterations"] == sum(
        rec["n_iter"] for rec in run["node_records"].values()
    ) + sum(rec["n_iter"] for rec in run["target_records"].values())


def test_distance_study_files(tmp_path):
    cfg = ExperimentConfig(
        experiment="distance_study", n_values=(2, 3), store_sizes=(1, 4),
        trials=10, master_seed=25, output_dir=str(tmp_path / "out"),
    )
    study = run_distance_study(cfg)
    write_distance_study(study, cfg)
    lines = open(os.path.join(cfg.output_dir, "dist_study.csv")).read().splitlines()
    assert lines[0] == "# schema: mtqo.dist_study.v1"
    assert lines[1] == "n,K,trials,mean,std,seed"
    assert len(lines) == 2 + 4  # 2 n-values x 2 sizes


def test_single_optimize_files(tmp_path):
    cfg = ExperimentConfig(
        experiment="single_optimize", n_values=(2,), master_seed=26,
        output_dir=str(tmp_path / "out"),
        optimizer=OptimizerConfig(**FAST_OPT),
    )
    result = run_single_optimize(cfg)
    write_single_optimize(result, cfg)
    payload = json.load(open(os.path.join(cfg.output_dir, "record.json")))
    assert payload["n"] == 2
    rec = payload["record"]
    assert len(rec["cost_trace"]) == rec["n_iter"] + 1
    assert rec["qe_total"] == rec["n_iter"] * (2 * 12 + 1) + 1
