"""Distance metric axioms and the coverage study."""

import numpy as np
import pytest

from mtqo.errors import ConfigError
from mtqo.metrics import (
    avg_min_distance,
    distance,
    distance_study,
    per_trial_min_distances,
)
from mtqo.statevector import QuantumState, sample_random_state


def test_distance_trivials():
    s = sample_random_state(2, 1)
    assert distance(s, s) == 0.0
    ket00 = QuantumState(2, [1, 0, 0, 0])
    ket11 = QuantumState(2, [0, 0, 0, 1])
    assert distance(ket00, ket11) == pytest.approx(np.sqrt(2))


def test_distance_axioms_random_sweep():
    for i in range(1000):
        a = sample_random_state(2, 3 * i)
        b = sample_random_state(2, 3 * i + 1)
        c = sample_random_state(2, 3 * i + 2)
        dab, dba = distance(a, b), distance(b, a)
        assert dab >= 0
        assert dab == pytest.approx(dba)
        assert dab <= distance(a, c) + distance(c, b) + 1e-12


def test_distance_mismatch():
    with pytest.raises(ConfigError):
        distance(sample_random_state(2, 1), sample_random_state(3, 1))


def test_phase_aligned_distance():
    a = sample_random_state(3, 10)
    b = sample_random_state(3, 11)
    rotated = QuantumState(3, np.exp(1j * 0.77) * b.amplitudes)
    # invariant under global phase, and never larger than the raw norm
    assert distance(a, rotated, phase_aligned=True) == pytest.approx(
        distance(a, b, phase_aligned=True)
    )
    assert distance(a, b, phase_aligned=True) <= distance(a, b) + 1e-12
    assert distance(a, a, phase_aligned=True) == pytest.approx(0.0, abs=1e-7)


def test_avg_min_distance_trivials():
    A = [sample_random_state(2, i) for i in range(5)]
    B = A[1:3]
    assert avg_min_distance(B, A) == pytest.approx(0.0)

    single = [sample_random_state(2, 99)]
    expected = np.mean([distance(y, single[0]) for y in B])
    assert avg_min_distance(B, single) == pytest.approx(expected)


def test_avg_min_distance_superset_monotone():
    B = [sample_random_state(3, 200 + i) for i in range(6)]
    A = [sample_random_state(3, 300 + i) for i in range(10)]
    bigger = A + [sample_random_state(3, 400 + i) for i in range(10)]
    assert avg_min_distance(B, bigger) <= avg_min_distance(B, A) + 1e-15


def test_avg_min_distance_empty():
    s = [sample_random_state(2, 1)]
    with pytest.raises(ConfigError):
        avg_min_distance([], s)
    with pytest.raises(ConfigError):
        avg_min_distance(s, [])


def test_per_trial_curves_non_increasing():
    sizes, mins = per_trial_min_distances(2, (1, 2, 5, 10, 20), 50, 7)
    assert sizes == [1, 2, 5, 10, 20]
    assert mins.shape == (50, 5)
    assert np.all(np.diff(mins, axis=1) <= 0)


def test_distance_study_rows():
    rows = distance_study((2, 3), (1, 5, 10), 25, 9)
    assert len(rows) == 6
    by_n = {}
    for r in rows:
        assert r.trials == 25
        assert r.mean_min_distance >= 0 and r.std_min_distance >= 0
        by_n.setdefault(r.num_qubits, []).append(r)
    for n, grp in by_n.items():
        means = [r.mean_min_distance for r in sorted(grp, key=lambda r: r.store_size)]
        assert means == sorted(means, reverse=True)  # non-increasing in K


def test_distance_study_single_cell():
    rows = distance_study((2,), (1,), 1, 3)
    assert len(rows) == 1
    assert rows[0].std_min_distance == 0.0


def test_distance_study_deterministic():
    r1 = distance_study((2,), (1, 4), 10, 42)
    r2 = distance_study((2,), (1, 4), 10, 42)
    assert [(a.mean_min_distance, a.std_min_distance) for a in r1] == [
        (b.mean_min_distance, b.std_min_distance) for b in r2
    ]


def test_distance_study_validation():
    with pytest.raises(ConfigError):
        distance_study((2,), (1,), 0, 1)
    with pytest.raises(ConfigError):
        distance_study((2,), (0,), 5, 1)
