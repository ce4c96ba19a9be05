"""Persistent set of optimized targets (the transfer sources).

A store holds, for one ansatz shape, every target state optimized so far
together with its optimized parameters. Serialization is JSON with
amplitudes as [re, im] pairs; floats round-trip exactly through repr, so a
save/load cycle reproduces the arrays bit for bit.
"""

import json
import os
from dataclasses import dataclass, field
from typing import List

import numpy as np

from .ansatz import AnsatzSpec, ansatz_from_dict, ansatz_to_dict
from .errors import ConfigError, IntegrityError, SchemaError
from .statevector import QuantumState, state_from_pairs, state_to_pairs

STORE_SCHEMA = "mtqo.store.v1"


@dataclass
class OptimizedEntry:
    target: QuantumState
    theta_star: np.ndarray
    final_cost: float
    record_ref: str
    seed: int = 0
    provenance: str = "cold"


@dataclass
class OptimizedStore:
    ansatz: AnsatzSpec
    entries: List[OptimizedEntry] = field(default_factory=list)

    def append(self, entry: OptimizedEntry) -> None:
        if entry.target.num_qubits != self.ansatz.num_qubits:
            raise ConfigError(
                f"entry has {entry.target.num_qubits} qubits, store ansatz has "
                f"{self.ansatz.num_qubits}"
            )
        theta = np.asarray(entry.theta_star, dtype=np.float64).reshape(-1)
        if theta.shape[0] != self.ansatz.param_count:
            raise ConfigError(
                f"entry has {theta.shape[0]} parameters, store ansatz has "
                f"{self.ansatz.param_count}"
            )
        entry.theta_star = theta
        self.entries.append(entry)

    def __len__(self) -> int:
        return len(self.entries)


def save_store(store: OptimizedStore, path: str) -> None:
    payload = {
        "schema": STORE_SCHEMA,
        "ansatz": ansatz_to_dict(store.ansatz),
        "entries": [
            {
                "record_ref": e.record_ref,
                "seed": int(e.seed),
                "provenance": e.provenance,
                "final_cost": float(e.final_cost),
                "theta": [float(v) for v in e.theta_star],
                "amplitudes": state_to_pairs(e.target),
            }
            for e in store.entries
        ],
    }
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    os.replace(tmp, path)


def _entry_field(raw: dict, key: str, index: int):
    if key not in raw:
        raise SchemaError(f"entry {index}: missing key {key!r}")
    return raw[key]


def load_store(path: str) -> OptimizedStore:
    """Load and validate a store file.

    Malformed JSON or missing/mistyped keys raise SchemaError; files that
    parse but break internal consistency (wrong amplitude count, bad norm,
    parameter length mismatch, out-of-range cost) raise IntegrityError
    naming the offending entry.
    """
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(payload, dict):
        raise SchemaError(f"{path}: top level must be an object")
    if payload.get("schema") != STORE_SCHEMA:
        raise SchemaError(
            f"{path}: unknown schema {payload.get('schema')!r}, expected {STORE_SCHEMA!r}"
        )
    if "ansatz" not in payload or "entries" not in payload:
        raise SchemaError(f"{path}: missing 'ansatz' or 'entries'")
    try:
        spec = ansatz_from_dict(payload["ansatz"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, IntegrityError):
            raise
        raise SchemaError(f"{path}: bad ansatz block ({exc})") from exc

    store = OptimizedStore(ansatz=spec)
    dim = 2**spec.num_qubits
    for i, raw in enumerate(payload["entries"]):
        if not isinstance(raw, dict):
            raise SchemaError(f"entry {i}: must be an object")
        pairs = _entry_field(raw, "amplitudes", i)
        theta = _entry_field(raw, "theta", i)
        cost_val = _entry_field(raw, "final_cost", i)
        if not isinstance(pairs, list) or any(
            not isinstance(p, list) or len(p) != 2 for p in pairs
        ):
            raise SchemaError(f"entry {i}: amplitudes must be [re, im] pairs")
        if len(pairs) != dim:
            raise IntegrityError(
                f"entry {i}: expected {dim} amplitudes, found {len(pairs)}"
            )
        try:
            state = state_from_pairs(pairs, spec.num_qubits)
        except (ConfigError, TypeError, ValueError) as exc:
            raise IntegrityError(f"entry {i}: bad amplitudes ({exc})") from exc
        norm = state.norm()
        if abs(norm - 1.0) > 1e-9:
            raise IntegrityError(f"entry {i}: state norm {norm} is not 1")
        theta_arr = np.asarray(theta, dtype=np.float64).reshape(-1)
        if theta_arr.shape[0] != spec.param_count:
            raise IntegrityError(
                f"entry {i}: expected {spec.param_count} parameters, found "
                f"{theta_arr.shape[0]}"
            )
        if not np.all(np.isfinite(theta_arr)):
            raise IntegrityError(f"entry {i}: non-finite parameters")
        if not (isinstance(cost_val, (int, float)) and np.isfinite(cost_val)):
            raise SchemaError(f"entry {i}: final_cost must be a finite number")
        if not -1e-9 <= cost_val <= 1.0 + 1e-9:
            raise IntegrityError(f"entry {i}: final_cost {cost_val} outside [0, 1]")
        store.entries.append(
            OptimizedEntry(
                target=state,
                theta_star=theta_arr,
                final_cost=float(cost_val),
                record_ref=str(raw.get("record_ref", f"entry-{i}")),
                seed=int(raw.get("seed", 0)),
                provenance=str(raw.get("provenance", "cold")),
            )
        )
    return store
