"""Threshold-checked gradient descent on the fidelity cost.

The loop evaluates the cost first and exits as soon as it drops to the
threshold tau, so a run that starts converged performs exactly one quantum
evaluation. Each full iteration costs 2m+1 QE (one cost check plus the
parameter-shift gradient); a run that stops after n_iter iterations has
qe_total = n_iter*(2m+1) + 1, the +1 being the check that ended it.

Update rules: plain gradient descent and Adam with bias-corrected moments.
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .ansatz import AnsatzSpec, _check_theta
from .errors import ConfigError, NumericalFailure
from .objective import QECounter, cost, gradient
from .statevector import QuantumState

INIT_PROVENANCES = ("cold", "warm_start", "estimator", "tree_parent")


@dataclass
class OptimizerConfig:
    rule: str = "adam"
    learning_rate: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    threshold_tau: float = 1e-3
    max_iterations: int = 200

    def __post_init__(self):
        if self.rule not in ("adam", "gd"):
            raise ConfigError(f"rule must be 'adam' or 'gd', got {self.rule!r}")
        if not (np.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if not 0 <= self.beta1 < 1:
            raise ConfigError(f"beta1 must be in [0, 1), got {self.beta1}")
        if not 0 <= self.beta2 < 1:
            raise ConfigError(f"beta2 must be in [0, 1), got {self.beta2}")
        if not (np.isfinite(self.epsilon) and self.epsilon > 0):
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if not (np.isfinite(self.threshold_tau) and self.threshold_tau > 0):
            raise ConfigError(f"threshold_tau must be positive, got {self.threshold_tau}")
        if self.max_iterations < 0:
            raise ConfigError(f"max_iterations must be >= 0, got {self.max_iterations}")


@dataclass
class AdamState:
    first_moment: np.ndarray
    second_moment: np.ndarray
    step_count: int = 0

    @classmethod
    def zeros(cls, param_count: int) -> "AdamState":
        return cls(
            first_moment=np.zeros(param_count),
            second_moment=np.zeros(param_count),
        )


def gd_step(theta: np.ndarray, grad: np.ndarray, config: OptimizerConfig) -> np.ndarray:
    return theta - config.learning_rate * grad


def adam_step(
    theta: np.ndarray, grad: np.ndarray, config: OptimizerConfig, state: AdamState
):
    """One Adam update; returns (new_theta, new_state) without mutating state."""
    t = state.step_count + 1
    m = config.beta1 * state.first_moment + (1 - config.beta1) * grad
    v = config.beta2 * state.second_moment + (1 - config.beta2) * grad**2
    m_hat = m / (1 - config.beta1**t)
    v_hat = v / (1 - config.beta2**t)
    new_theta = theta - config.learning_rate * m_hat / (np.sqrt(v_hat) + config.epsilon)
    return new_theta, AdamState(first_moment=m, second_moment=v, step_count=t)


def random_parameters(param_count: int, seed: int) -> np.ndarray:
    """Cold-start draw: i.i.d. uniform angles on [0, 2*pi)."""
    if param_count < 1:
        raise ConfigError(f"param_count must be >= 1, got {param_count}")
    rng = np.random.default_rng(seed)
    return rng.uniform(0.0, 2.0 * np.pi, size=param_count)


@dataclass
class OptimizationRecord:
    final_theta: np.ndarray
    final_cost: float
    n_iter: int
    cost_trace: List[float]
    qe_total: int
    converged: bool
    init_provenance: str
    seed: int

    def __post_init__(self):
        if self.init_provenance not in INIT_PROVENANCES:
            raise ConfigError(f"unknown init_provenance {self.init_provenance!r}")


def optimize(
    spec: AnsatzSpec,
    theta0,
    target: QuantumState,
    config: Optional[OptimizerConfig] = None,
    seed: int = 0,
    init_provenance: str = "cold",
) -> OptimizationRecord:
    """Check-then-step descent from theta0 until cost <= tau or the cap.

    cost_trace holds every evaluated checkpoint cost, length n_iter + 1; its
    last entry is final_cost. Deterministic given identical inputs. Raises
    NumericalFailure carrying the offending iterate if any evaluation goes
    non-finite.
    """
    if config is None:
        config = OptimizerConfig()
    theta = _check_theta(spec, theta0).copy()
    counter = QECounter()
    trace: List[float] = []
    adam = AdamState.zeros(spec.param_count)

    def checked_cost(th, iteration):
        c = cost(spec, th, target, counter)
        if not np.isfinite(c):
            raise NumericalFailure(
                f"non-finite cost at iteration {iteration}", theta=th, iteration=iteration
            )
        return c

    n_iter = config.max_iterations
    converged = False
    for t in range(config.max_iterations):
        c = checked_cost(theta, t)
        trace.append(c)
        if c <= config.threshold_tau:
            n_iter, converged = t, True
            break
        g = gradient(spec, theta, target, counter)
        if not np.all(np.isfinite(g)):
            raise NumericalFailure(
                f"non-finite gradient at iteration {t}", theta=theta, iteration=t
            )
        if config.rule == "adam":
            theta, adam = adam_step(theta, g, config, adam)
        else:
            theta = gd_step(theta, g, config)
        if not np.all(np.isfinite(theta)):
            raise NumericalFailure(
                f"non-finite parameters after iteration {t}", theta=theta, iteration=t
            )
    else:
        c = checked_cost(theta, config.max_iterations)
        trace.append(c)
        converged = c <= config.threshold_tau

    return OptimizationRecord(
        final_theta=theta,
        final_cost=trace[-1],
        n_iter=n_iter,
        cost_trace=trace,
        qe_total=counter.total_evaluations,
        converged=converged,
        init_provenance=init_provenance,
        seed=seed,
    )
