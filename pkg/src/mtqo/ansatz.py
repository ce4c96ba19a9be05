"""Layered circuit template: CRY entangler ring followed by a ZXZ block.

One layer over n qubits (n >= 2) is, in application order:

  CRY(0->1), CRY(1->2), ..., CRY(n-1->0)     fixed-angle entanglers
  then per qubit q: RZ, RX, RZ               trainable

The CRY ring carries a constant entangler angle (default pi) and no trainable
parameter, so a circuit with L layers has 4nL gates and m = 3nL trainable
angles, indexed 0..m-1 in gate application order. Only single-qubit rotations
are trainable, which keeps the two-term parameter-shift rule exact and the
cost 2*pi-periodic in every parameter.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import ConfigError
from .statevector import (
    GateDescriptor,
    QuantumState,
    _apply_controlled,
    _apply_controlled_batch,
    _apply_single,
    _apply_single_batch,
    batch_rotation_matrices,
    gate_matrix,
    ry_matrix,
    zero_state,
)


@dataclass(frozen=True)
class AnsatzSpec:
    num_qubits: int
    num_layers: int
    entangler_angle: float
    gates: Tuple[GateDescriptor, ...]
    param_count: int


def build_ansatz(
    num_qubits: int, num_layers: int, entangler_angle: float = np.pi
) -> AnsatzSpec:
    """Build the gate list for n qubits and L layers; m = 3nL parameters."""
    if num_qubits < 2:
        raise ConfigError(
            f"ansatz needs at least 2 qubits (CRY ring), got {num_qubits}"
        )
    if num_layers < 1:
        raise ConfigError(f"num_layers must be >= 1, got {num_layers}")
    if not np.isfinite(entangler_angle):
        raise ConfigError("entangler_angle must be finite")

    gates = []
    p = 0
    for _ in range(num_layers):
        for i in range(num_qubits):
            gates.append(
                GateDescriptor(
                    kind="CRY",
                    target_qubit=(i + 1) % num_qubits,
                    control_qubit=i,
                    fixed_angle=float(entangler_angle),
                )
            )
        for q in range(num_qubits):
            for kind in ("RZ", "RX", "RZ"):
                gates.append(GateDescriptor(kind=kind, target_qubit=q, param_index=p))
                p += 1
    return AnsatzSpec(
        num_qubits=num_qubits,
        num_layers=num_layers,
        entangler_angle=float(entangler_angle),
        gates=tuple(gates),
        param_count=p,
    )


def _check_theta(spec: AnsatzSpec, theta: np.ndarray) -> np.ndarray:
    theta = np.asarray(theta, dtype=np.float64).reshape(-1)
    if theta.shape[0] != spec.param_count:
        raise ConfigError(
            f"expected {spec.param_count} parameters, got {theta.shape[0]}"
        )
    if not np.all(np.isfinite(theta)):
        raise ConfigError("parameters must be finite")
    return theta


def prepare_state(spec: AnsatzSpec, theta: Sequence[float]) -> QuantumState:
    """Run the circuit on |0...0> and return the prepared state."""
    theta = _check_theta(spec, theta)
    n = spec.num_qubits
    amps = zero_state(n).amplitudes
    for gate in spec.gates:
        if gate.kind == "CRY":
            amps = _apply_controlled(
                amps, ry_matrix(gate.fixed_angle), gate.control_qubit,
                gate.target_qubit, n,
            )
        else:
            angle = theta[gate.param_index]
            amps = _apply_single(amps, gate_matrix(gate.kind, angle),
                                 gate.target_qubit, n)
    return QuantumState(n, amps)


def prepare_state_batch(spec: AnsatzSpec, thetas: np.ndarray) -> np.ndarray:
    """Prepare one state per parameter row; returns (B, 2**n) amplitudes.

    Row b of the result equals prepare_state(spec, thetas[b]) up to float
    round-off from the batched contraction order.
    """
    thetas = np.asarray(thetas, dtype=np.float64)
    if thetas.ndim != 2 or thetas.shape[1] != spec.param_count:
        raise ConfigError(
            f"expected shape (B, {spec.param_count}), got {thetas.shape}"
        )
    if not np.all(np.isfinite(thetas)):
        raise ConfigError("parameters must be finite")
    n = spec.num_qubits
    batch = thetas.shape[0]
    amps = np.zeros((batch, 2**n), dtype=np.complex128)
    amps[:, 0] = 1.0
    for gate in spec.gates:
        if gate.kind == "CRY":
            amps = _apply_controlled_batch(
                amps, ry_matrix(gate.fixed_angle), gate.control_qubit,
                gate.target_qubit, n,
            )
        else:
            mats = batch_rotation_matrices(gate.kind, thetas[:, gate.param_index])
            amps = _apply_single_batch(amps, mats, gate.target_qubit, n)
    return amps


def ansatz_to_dict(spec: AnsatzSpec) -> dict:
    gates = []
    for g in spec.gates:
        entry = {"kind": g.kind, "target": g.target_qubit}
        if g.control_qubit is not None:
            entry["control"] = g.control_qubit
        if g.param_index is not None:
            entry["param"] = g.param_index
        if g.fixed_angle is not None:
            entry["angle"] = g.fixed_angle
        gates.append(entry)
    return {
        "num_qubits": spec.num_qubits,
        "num_layers": spec.num_layers,
        "entangler_angle": spec.entangler_angle,
        "param_count": spec.param_count,
        "gates": gates,
    }


def ansatz_from_dict(data: dict) -> AnsatzSpec:
    """Rebuild from serialized form and cross-check the recorded gate list."""
    from .errors import IntegrityError

    spec = build_ansatz(
        int(data["num_qubits"]), int(data["num_layers"]),
        float(data.get("entangler_angle", np.pi)),
    )
    if int(data.get("param_count", spec.param_count)) != spec.param_count:
        raise IntegrityError(
            f"recorded param_count {data['param_count']} does not match "
            f"rebuilt ansatz ({spec.param_count})"
        )
    recorded = data.get("gates")
    if recorded is not None and ansatz_to_dict(spec)["gates"] != recorded:
        raise IntegrityError("recorded gate list does not match rebuilt ansatz")
    return spec
