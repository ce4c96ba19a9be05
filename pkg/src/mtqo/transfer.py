"""Transfer strategies: reuse optimized parameters for new targets.

warm_start_optimize seeds descent from the nearest stored target's optimum.
estimate_parameters makes a first-order jump from a source optimum: with
c = C_y(theta*) and g = grad C_y(theta*), the correction
theta~ = theta* - g * c / ||g||^2 is the smallest step that cancels the
linearized cost, so g . (theta~ - theta*) = -c holds to round-off.
estimator_optimize screens several near sources by actual cost before
estimating, then finishes with ordinary descent if needed.
"""

from dataclasses import dataclass

import numpy as np

from .ansatz import AnsatzSpec
from .errors import ConfigError
from .metrics import distance
from .objective import QECounter, cost, gradient
from .optimizer import OptimizationRecord, OptimizerConfig, optimize
from .statevector import QuantumState
from .store import OptimizedEntry, OptimizedStore

DEGENERATE_GRAD_NORM = 1e-12


@dataclass
class TransferStrategy:
    kind: str = "estimator"  # "cold" | "warm_start" | "estimator"
    candidate_count: int = 5

    def __post_init__(self):
        if self.kind not in ("cold", "warm_start", "estimator"):
            raise ConfigError(f"unknown strategy kind {self.kind!r}")
        if self.candidate_count < 1:
            raise ConfigError(
                f"candidate_count must be >= 1, got {self.candidate_count}"
            )


def nearest_target(y: QuantumState, store: OptimizedStore):
    """Index and distance of the stored entry nearest to y (lowest index wins ties)."""
    if len(store) == 0:
        raise ConfigError("store is empty, no transfer source available")
    dists = np.array([distance(y, e.target) for e in store.entries])
    k = int(np.argmin(dists))
    return k, float(dists[k])


def warm_start_optimize(
    y: QuantumState,
    store: OptimizedStore,
    config: OptimizerConfig = None,
    seed: int = 0,
) -> OptimizationRecord:
    """Descend from the nearest stored optimum instead of a random point."""
    k, _ = nearest_target(y, store)
    return optimize(
        store.ansatz,
        store.entries[k].theta_star,
        y,
        config,
        seed=seed,
        init_provenance="warm_start",
    )


@dataclass
class ParameterEstimate:
    theta: np.ndarray
    cost_at_source: float
    grad_norm: float
    degenerate: bool


def estimate_parameters(
    spec: AnsatzSpec,
    source: OptimizedEntry,
    y: QuantumState,
    counter: QECounter = None,
) -> ParameterEstimate:
    """First-order parameter jump from a source optimum toward target y.

    Costs 2m+1 QE (one cost, one gradient). If the gradient is numerically
    zero the estimate degenerates to the source parameters and is flagged.
    """
    theta_star = np.asarray(source.theta_star, dtype=np.float64)
    c = cost(spec, theta_star, y, counter)
    g = gradient(spec, theta_star, y, counter)
    gnorm = float(np.linalg.norm(g))
    if gnorm < DEGENERATE_GRAD_NORM:
        return ParameterEstimate(
            theta=theta_star.copy(), cost_at_source=c, grad_norm=gnorm, degenerate=True
        )
    theta = theta_star - g * (c / (gnorm * gnorm))
    return ParameterEstimate(
        theta=theta, cost_at_source=c, grad_norm=gnorm, degenerate=False
    )


def estimator_optimize(
    y: QuantumState,
    store: OptimizedStore,
    strategy: TransferStrategy = None,
    config: OptimizerConfig = None,
    seed: int = 0,
) -> OptimizationRecord:
    """Screen near sources, jump, then descend if still above threshold.

    Protocol: take the candidate_count nearest stored entries (clipped to the
    store size), evaluate the true cost of each source optimum on y (1 QE
    apiece), and return the best source outright if it is already below tau.
    Otherwise estimate from the best candidate and hand the estimate to
    optimize, whose own first check returns immediately when the jump landed
    below tau. qe_total accounts for screening and estimation on top of the
    descent.
    """
    if strategy is None:
        strategy = TransferStrategy()
    if strategy.kind != "estimator":
        raise ConfigError(
            f"estimator_optimize needs strategy kind 'estimator', got {strategy.kind!r}"
        )
    if config is None:
        config = OptimizerConfig()
    if len(store) == 0:
        raise ConfigError("store is empty, no transfer source available")
    spec = store.ansatz
    counter = QECounter()

    dists = np.array([distance(y, e.target) for e in store.entries])
    k = min(strategy.candidate_count, len(store))
    order = np.argsort(dists, kind="stable")[:k]
    screen_costs = np.array(
        [cost(spec, store.entries[i].theta_star, y, counter) for i in order]
    )
    best = int(np.argmin(screen_costs))
    best_entry = store.entries[int(order[best])]
    best_cost = float(screen_costs[best])

    if best_cost <= config.threshold_tau:
        return OptimizationRecord(
            final_theta=np.asarray(best_entry.theta_star, dtype=np.float64).copy(),
            final_cost=best_cost,
            n_iter=0,
            cost_trace=[best_cost],
            qe_total=counter.total_evaluations,
            converged=True,
            init_provenance="estimator",
            seed=seed,
        )

    estimate = estimate_parameters(spec, best_entry, y, counter)
    record = optimize(
        spec, estimate.theta, y, config, seed=seed, init_provenance="estimator"
    )
    record.qe_total += counter.total_evaluations
    return record
