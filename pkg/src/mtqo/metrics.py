"""State-space distances and the store-coverage study.

distance() is the raw Euclidean norm of the amplitude difference, which is
what the nearest-source lookup uses. The global-phase-aligned variant
(min over phase of ||y - e^{i phi} x||) is available behind a flag but is
never the default.

distance_study() measures how close the nearest of K random stored states
gets to a fresh random target. Within one trial the K-sized pools are
nested prefixes of a single draw, so the per-trial minimum distance is
exactly non-increasing in K.
"""

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .errors import ConfigError
from .seeding import derive_seed
from .statevector import QuantumState, overlap, sample_random_state


def distance(a: QuantumState, b: QuantumState, phase_aligned: bool = False) -> float:
    if a.num_qubits != b.num_qubits:
        raise ConfigError(
            f"qubit count mismatch: {a.num_qubits} vs {b.num_qubits}"
        )
    if phase_aligned:
        # min_phi ||a - e^{i phi} b|| = sqrt(2 - 2|<a|b>|) for unit vectors
        ov = abs(overlap(a, b))
        return float(np.sqrt(max(0.0, 2.0 - 2.0 * ov)))
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))


def avg_min_distance(targets: Sequence[QuantumState], stored: Sequence[QuantumState]) -> float:
    """Mean over targets of the distance to their nearest stored state."""
    if len(targets) == 0:
        raise ConfigError("targets must be non-empty")
    if len(stored) == 0:
        raise ConfigError("stored set must be non-empty")
    mins = []
    for y in targets:
        mins.append(min(distance(y, x) for x in stored))
    return float(np.mean(mins))


@dataclass
class DistanceStudyRow:
    num_qubits: int
    store_size: int
    trials: int
    mean_min_distance: float
    std_min_distance: float


def per_trial_min_distances(
    num_qubits: int,
    store_sizes: Sequence[int],
    trials: int,
    master_seed: int,
):
    """Per-trial nearest-distance curves; returns (sizes, matrix).

    matrix[t, j] is trial t's distance from its fresh target to the nearest
    of the first sizes[j] stored states. Store pools are nested prefixes of
    one draw per trial, so every row is non-increasing by construction.
    """
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    sizes = sorted(set(int(k) for k in store_sizes))
    if not sizes or sizes[0] < 1:
        raise ConfigError(f"store sizes must be positive, got {store_sizes}")
    n = int(num_qubits)
    pool_size = sizes[-1]
    mins = np.empty((trials, len(sizes)))
    for t in range(trials):
        y = sample_random_state(n, derive_seed(master_seed, "study-target", n, t))
        pool = np.empty((pool_size, 2**n), dtype=np.complex128)
        for k in range(pool_size):
            pool[k] = sample_random_state(
                n, derive_seed(master_seed, "study-store", n, t, k)
            ).amplitudes
        dists = np.linalg.norm(pool - y.amplitudes, axis=1)
        running = np.minimum.accumulate(dists)
        for j, K in enumerate(sizes):
            mins[t, j] = running[K - 1]
    return sizes, mins


def distance_study(
    n_values: Sequence[int],
    store_sizes: Sequence[int],
    trials: int,
    master_seed: int,
) -> List[DistanceStudyRow]:
    """Min-distance statistics over seeded trials for each (n, K) cell.

    Per trial: one fresh target, one pool of max(K) stored states; the cell
    for size K uses the first K pool states. std is the population standard
    deviation (0 for a single trial).
    """
    rows = []
    for n in n_values:
        sizes, mins = per_trial_min_distances(
            n, store_sizes, trials, master_seed
        )
        for j, K in enumerate(sizes):
            rows.append(
                DistanceStudyRow(
                    num_qubits=int(n),
                    store_size=K,
                    trials=trials,
                    mean_min_distance=float(mins[:, j].mean()),
                    std_min_distance=float(mins[:, j].std()),
                )
            )
    return rows
