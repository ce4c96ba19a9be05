"""Store persistence: round trips and corruption handling."""

import json

import numpy as np
import pytest

from mtqo.ansatz import build_ansatz
from mtqo.errors import ConfigError, IntegrityError, SchemaError
from mtqo.optimizer import OptimizerConfig, optimize, random_parameters
from mtqo.statevector import sample_random_state
from mtqo.store import OptimizedEntry, OptimizedStore, load_store, save_store


@pytest.fixture(scope="module")
def filled_store():
    spec = build_ansatz(2, 2)
    store = OptimizedStore(ansatz=spec)
    for i in range(3):
        target = sample_random_state(2, 70 + i)
        rec = optimize(
            spec,
            random_parameters(spec.param_count, 80 + i),
            target,
            OptimizerConfig(),
        )
        store.append(OptimizedEntry(
            target=target,
            theta_star=rec.final_theta,
            final_cost=rec.final_cost,
            record_ref=f"r{i}",
            seed=80 + i,
            provenance="cold",
        ))
    return store


def test_round_trip(filled_store, tmp_path):
    path = str(tmp_path / "store.json")
    save_store(filled_store, path)
    back = load_store(path)
    assert back.ansatz == filled_store.ansatz
    assert len(back) == len(filled_store)
    for a, b in zip(filled_store.entries, back.entries):
        np.testing.assert_allclose(
            a.target.amplitudes, b.target.amplitudes, atol=1e-15
        )
        np.testing.assert_allclose(a.theta_star, b.theta_star, atol=1e-15)
        assert b.final_cost == pytest.approx(a.final_cost, abs=1e-15)
        assert (a.record_ref, a.seed, a.provenance) == (
            b.record_ref, b.seed, b.provenance,
        )


def test_save_is_deterministic(filled_store, tmp_path):
    p1, p2 = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    save_store(filled_store, p1)
    save_store(filled_store, p2)
    assert open(p1, "rb").read() == open(p2, "rb").read()


def test_truncated_file(filled_store, tmp_path):
    path = str(tmp_path / "store.json")
    save_store(filled_store, path)
    text = open(path).read()
    open(path, "w").write(text[: len(text) // 2])
    with pytest.raises(SchemaError):
        load_store(path)


def test_wrong_schema_tag(tmp_path):
    path = str(tmp_path / "store.json")
    open(path, "w").write(json.dumps({"schema": "other.v9"}))
    with pytest.raises(SchemaError):
        load_store(path)


def test_not_an_object(tmp_path):
    path = str(tmp_path / "store.json")
    open(path, "w").write("[1, 2, 3]")
    with pytest.raises(SchemaError):
        load_store(path)


def _saved_payload(store, tmp_path):
    path = str(tmp_path / "store.json")
    save_store(store, path)
    return path, json.load(open(path))


def test_entry_param_mismatch_names_entry(filled_store, tmp_path):
    path, payload = _saved_payload(filled_store, tmp_path)
    payload["entries"][1]["theta"] = payload["entries"][1]["theta"][:-1]
    json.dump(payload, open(path, "w"))
    with pytest.raises(IntegrityError, match="entry 1"):
        load_store(path)


def test_entry_bad_norm(filled_store, tmp_path):
    path, payload = _saved_payload(filled_store, tmp_path)
    payload["entries"][0]["amplitudes"][0] = [5.0, 0.0]
    json.dump(payload, open(path, "w"))
    with pytest.raises(IntegrityError, match="entry 0"):
        load_store(path)


def test_entry_wrong_amplitude_count(filled_store, tmp_path):
    path, payload = _saved_payload(filled_store, tmp_path)
    payload["entries"][2]["amplitudes"].append([0.0, 0.0])
    json.dump(payload, open(path, "w"))
    with pytest.raises(IntegrityError, match="entry 2"):
        load_store(path)


def test_entry_cost_out_of_range(filled_store, tmp_path):
    path, payload = _saved_payload(filled_store, tmp_path)
    payload["entries"][0]["final_cost"] = 1.5
    json.dump(payload, open(path, "w"))
    with pytest.raises(IntegrityError, match="entry 0"):
        load_store(path)


def test_entry_missing_field(filled_store, tmp_path):
    path, payload = _saved_payload(filled_store, tmp_path)
    del payload["entries"][0]["theta"]
    json.dump(payload, open(path, "w"))
    with pytest.raises(SchemaError):
        load_store(path)


def test_tampered_ansatz_block(filled_store, tmp_path):
    path, payload = _saved_payload(filled_store, tmp_path)
    payload["ansatz"]["param_count"] = 99
    json.dump(payload, open(path, "w"))
    with pytest.raises(IntegrityError):
        load_store(path)


def test_append_validation():
    spec = build_ansatz(2, 1)
    store = OptimizedStore(ansatz=spec)
    with pytest.raises(ConfigError):
        store.append(OptimizedEntry(
            target=sample_random_state(3, 1),
            theta_star=np.zeros(6), final_cost=0.1, record_ref="x",
        ))
    with pytest.raises(ConfigError):
        store.append(OptimizedEntry(
            target=sample_random_state(2, 1),
            theta_star=np.zeros(5), final_cost=0.1, record_ref="x",
        ))
    assert len(store) == 0
