"""Dense statevector simulation.

A state over n qubits is a vector of 2**n complex amplitudes in the
computational basis. Qubit 0 is the most significant bit of the basis index:
for n=3, basis index 6 = 0b110 means qubit0=1, qubit1=1, qubit2=0.

Rotation gates use the half-angle convention, e.g.
RY(p) = [[cos p/2, -sin p/2], [sin p/2, cos p/2]], and CRY applies RY on the
target qubit conditioned on the control qubit being 1.

Gates are applied in O(2**n) by reshaping the amplitude vector to a rank-n
tensor and contracting the 2x2 matrix over one axis; the dense Kronecker
route exists only in the test oracles.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConfigError

GATE_KINDS = ("RX", "RY", "RZ", "CRY")


def rx_matrix(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def ry_matrix(angle: float) -> np.ndarray:
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rz_matrix(angle: float) -> np.ndarray:
    return np.array(
        [[np.exp(-1j * angle / 2), 0], [0, np.exp(1j * angle / 2)]],
        dtype=np.complex128,
    )


_MATRIX_FACTORIES = {"RX": rx_matrix, "RY": ry_matrix, "RZ": rz_matrix, "CRY": ry_matrix}


def gate_matrix(kind: str, angle: float) -> np.ndarray:
    """2x2 matrix for a gate kind; for CRY this is the conditioned RY block."""
    if kind not in _MATRIX_FACTORIES:
        raise ConfigError(f"unknown gate kind {kind!r}")
    return _MATRIX_FACTORIES[kind](angle)


@dataclass(frozen=True)
class GateDescriptor:
    """One gate slot in a circuit.

    Exactly one of param_index (trainable angle, index into the parameter
    vector) and fixed_angle (constant angle) is set. control_qubit is present
    iff kind == "CRY".
    """

    kind: str
    target_qubit: int
    control_qubit: Optional[int] = None
    param_index: Optional[int] = None
    fixed_angle: Optional[float] = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ConfigError(f"unknown gate kind {self.kind!r}")
        if (self.control_qubit is not None) != (self.kind == "CRY"):
            raise ConfigError("control_qubit must be present iff kind is CRY")
        if self.control_qubit is not None and self.control_qubit == self.target_qubit:
            raise ConfigError("control and target qubit must differ")
        if (self.param_index is None) == (self.fixed_angle is None):
            raise ConfigError("exactly one of param_index and fixed_angle must be set")


@dataclass
class QuantumState:
    num_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ConfigError(f"num_qubits must be >= 1, got {self.num_qubits}")
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != 2**self.num_qubits:
            raise ConfigError(
                f"expected {2**self.num_qubits} amplitudes for {self.num_qubits} "
                f"qubits, got {amps.shape[0]}"
            )
        if not np.all(np.isfinite(amps)):
            raise ConfigError("amplitudes must be finite")
        self.amplitudes = amps

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def zero_state(num_qubits: int) -> QuantumState:
    """|0...0>: amplitude 1.0 at basis index 0."""
    if num_qubits < 1:
        raise ConfigError(f"num_qubits must be >= 1, got {num_qubits}")
    amps = np.zeros(2**num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return QuantumState(num_qubits, amps)


def _contract_axis(tensor: np.ndarray, mat: np.ndarray, axis: int) -> np.ndarray:
    # new[..., i, ...] = sum_j mat[i, j] * tensor[..., j, ...] along the given axis
    moved = np.moveaxis(tensor, axis, -1)
    return np.moveaxis(moved @ mat.T, -1, axis)


def _apply_single(amps: np.ndarray, mat: np.ndarray, qubit: int, n: int) -> np.ndarray:
    psi = amps.reshape((2,) * n)
    return _contract_axis(psi, mat, qubit).reshape(-1)


def _apply_controlled(
    amps: np.ndarray, mat: np.ndarray, control: int, target: int, n: int
) -> np.ndarray:
    psi = amps.reshape((2,) * n).copy()
    view = np.moveaxis(psi, control, 0)
    # inside the control=1 block the target axis shifts down by one if it sat
    # above the control axis
    t = target - 1 if target > control else target
    view[1] = _contract_axis(view[1], mat, t)
    return psi.reshape(-1)


def _check_qubit(index: int, n: int, role: str) -> None:
    if not 0 <= index < n:
        raise ConfigError(f"{role} qubit {index} out of range for {n} qubits")


def apply_gate(state: QuantumState, gate: GateDescriptor, angle: float) -> QuantumState:
    """Apply one gate with an explicit angle; returns a new state."""
    n = state.num_qubits
    _check_qubit(gate.target_qubit, n, "target")
    if gate.kind == "CRY":
        _check_qubit(gate.control_qubit, n, "control")
        amps = _apply_controlled(
            state.amplitudes, ry_matrix(angle), gate.control_qubit, gate.target_qubit, n
        )
    else:
        amps = _apply_single(
            state.amplitudes, gate_matrix(gate.kind, angle), gate.target_qubit, n
        )
    return QuantumState(n, amps)


def overlap(a: QuantumState, b: QuantumState) -> complex:
    """<a|b> = sum_k conj(a_k) * b_k."""
    if a.num_qubits != b.num_qubits:
        raise ConfigError(
            f"qubit count mismatch: {a.num_qubits} vs {b.num_qubits}"
        )
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def sample_random_state(num_qubits: int, seed: int) -> QuantumState:
    """Haar-random state: normalized i.i.d. complex Gaussian amplitudes."""
    if num_qubits < 1:
        raise ConfigError(f"num_qubits must be >= 1, got {num_qubits}")
    rng = np.random.default_rng(seed)
    dim = 2**num_qubits
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    amps /= np.linalg.norm(amps)
    return QuantumState(num_qubits, amps)


def state_to_pairs(state: QuantumState) -> list:
    """Amplitudes as [re, im] pairs for JSON serialization."""
    return [[float(a.real), float(a.imag)] for a in state.amplitudes]


def state_from_pairs(pairs, num_qubits: int) -> QuantumState:
    amps = np.array(
        [complex(re, im) for re, im in pairs], dtype=np.complex128
    )
    return QuantumState(num_qubits, amps)


# --- batched kernels -------------------------------------------------------
#
# Used by the gradient path: a batch of B states evolves under the same gate
# sequence with per-row angles. amps has shape (B, 2**n); mats is a shared
# (2, 2) matrix or a per-row (B, 2, 2) stack.


def _contract_axis_batch(tensor: np.ndarray, mats: np.ndarray, axis: int) -> np.ndarray:
    moved = np.moveaxis(tensor, axis, -1)
    if mats.ndim == 2:
        out = moved @ mats.T
    else:
        # batched matmul over a (B, K, 2) view; much faster than an
        # ellipsis einsum for long gate sequences
        flat = moved.reshape(moved.shape[0], -1, 2)
        out = np.matmul(flat, mats.swapaxes(-1, -2)).reshape(moved.shape)
    return np.moveaxis(out, -1, axis)


def _apply_single_batch(
    amps: np.ndarray, mats: np.ndarray, qubit: int, n: int
) -> np.ndarray:
    batch = amps.shape[0]
    psi = amps.reshape((batch,) + (2,) * n)
    return _contract_axis_batch(psi, mats, 1 + qubit).reshape(batch, -1)


def _apply_controlled_batch(
    amps: np.ndarray, mats: np.ndarray, control: int, target: int, n: int
) -> np.ndarray:
    batch = amps.shape[0]
    psi = amps.reshape((batch,) + (2,) * n).copy()
    view = np.moveaxis(psi, 1 + control, 1)
    t = target - 1 if target > control else target
    view[:, 1] = _contract_axis_batch(view[:, 1], mats, 1 + t)
    return psi.reshape(batch, -1)


def batch_rotation_matrices(kind: str, angles: np.ndarray) -> np.ndarray:
    """Stack of 2x2 rotation matrices, one per angle; shape (B, 2, 2)."""
    angles = np.asarray(angles, dtype=np.float64)
    c, s = np.cos(angles / 2), np.sin(angles / 2)
    out = np.empty(angles.shape + (2, 2), dtype=np.complex128)
    if kind == "RX":
        out[..., 0, 0] = c
        out[..., 0, 1] = -1j * s
        out[..., 1, 0] = -1j * s
        out[..., 1, 1] = c
    elif kind == "RY":
        out[..., 0, 0] = c
        out[..., 0, 1] = -s
        out[..., 1, 0] = s
        out[..., 1, 1] = c
    elif kind == "RZ":
        out[..., 0, 0] = c - 1j * s
        out[..., 0, 1] = 0
        out[..., 1, 0] = 0
        out[..., 1, 1] = c + 1j * s
    else:
        raise ConfigError(f"no batched matrix for kind {kind!r}")
    return out
