"""Fidelity cost and its parameter-shift gradient.

C(theta, x) = 1 - |<x|U(theta)|0...0>|^2, in [0, 1]. Every circuit execution
counts as one quantum evaluation (QE) against the supplied QECounter: a cost
call is 1 QE, a partial is 2, a full gradient is 2m.

The two-term parameter-shift rule is exact here because every trainable gate
is a single-qubit rotation exp(-i*angle*G/2) with G^2 = I:

    dC/dtheta_j = (C(theta + (pi/2) e_j) - C(theta - (pi/2) e_j)) / 2
"""

from dataclasses import dataclass

import numpy as np

from .ansatz import AnsatzSpec, _check_theta, prepare_state, prepare_state_batch
from .errors import ConfigError
from .statevector import QuantumState

SHIFT = np.pi / 2


@dataclass
class QECounter:
    """Monotonic count of cost-function executions."""

    total_evaluations: int = 0

    def add(self, k: int = 1) -> None:
        self.total_evaluations += k


def _check_target(spec: AnsatzSpec, target: QuantumState) -> None:
    if target.num_qubits != spec.num_qubits:
        raise ConfigError(
            f"target has {target.num_qubits} qubits, ansatz has {spec.num_qubits}"
        )


def cost(spec: AnsatzSpec, theta, target: QuantumState, counter: QECounter = None) -> float:
    """Infidelity of the prepared state against the target; 1 QE."""
    _check_target(spec, target)
    psi = prepare_state(spec, theta)
    ov = np.vdot(target.amplitudes, psi.amplitudes)
    if counter is not None:
        counter.add(1)
    return float(1.0 - (ov.real**2 + ov.imag**2))


def psr_partial(
    spec: AnsatzSpec, theta, target: QuantumState, j: int, counter: QECounter = None
) -> float:
    """Partial derivative of the cost along parameter j; 2 QE."""
    theta = _check_theta(spec, theta)
    if not 0 <= j < spec.param_count:
        raise ConfigError(f"parameter index {j} out of range for m={spec.param_count}")
    shifted = theta.copy()
    shifted[j] = theta[j] + SHIFT
    plus = cost(spec, shifted, target, counter)
    shifted[j] = theta[j] - SHIFT
    minus = cost(spec, shifted, target, counter)
    return 0.5 * (plus - minus)


def gradient(
    spec: AnsatzSpec, theta, target: QuantumState, counter: QECounter = None
) -> np.ndarray:
    """Full parameter-shift gradient; 2m QE.

    Component j equals psr_partial(spec, theta, target, j). All 2m shifted
    circuits run as one batch.
    """
    theta = _check_theta(spec, theta)
    _check_target(spec, target)
    m = spec.param_count
    thetas = np.tile(theta, (2 * m, 1))
    idx = np.arange(m)
    thetas[2 * idx, idx] += SHIFT
    thetas[2 * idx + 1, idx] -= SHIFT
    amps = prepare_state_batch(spec, thetas)
    ov = amps @ np.conj(target.amplitudes)
    costs = 1.0 - (ov.real**2 + ov.imag**2)
    if counter is not None:
        counter.add(2 * m)
    return 0.5 * (costs[0::2] - costs[1::2])
