"""Multi-target quantum circuit optimization laboratory.

Optimizes parameterized quantum circuits against target states by dense
statevector simulation, and benchmarks transfer strategies (warm starts,
one-shot parameter estimation, cluster-tree flooding) against cold starts.
"""

from .ansatz import AnsatzSpec, build_ansatz, prepare_state
from .errors import (
    ConfigError,
    IntegrityError,
    MtqoError,
    NumericalFailure,
    SchemaError,
)
from .metrics import avg_min_distance, distance, distance_study
from .objective import QECounter, cost, gradient, psr_partial
from .optimizer import (
    OptimizationRecord,
    OptimizerConfig,
    optimize,
    random_parameters,
)
from .seeding import derive_seed
from .statevector import QuantumState, sample_random_state, zero_state
from .store import OptimizedEntry, OptimizedStore, load_store, save_store
from .transfer import (
    TransferStrategy,
    estimate_parameters,
    estimator_optimize,
    nearest_target,
    warm_start_optimize,
)
from .tree import TreeConfig, TreeNode, build_tree, train_tree

__version__ = "0.1.0"

__all__ = [
    "AnsatzSpec",
    "ConfigError",
    "IntegrityError",
    "MtqoError",
    "NumericalFailure",
    "OptimizationRecord",
    "OptimizedEntry",
    "OptimizedStore",
    "OptimizerConfig",
    "QECounter",
    "QuantumState",
    "SchemaError",
    "TransferStrategy",
    "TreeConfig",
    "TreeNode",
    "avg_min_distance",
    "build_ansatz",
    "build_tree",
    "cost",
    "derive_seed",
    "distance",
    "distance_study",
    "estimate_parameters",
    "estimator_optimize",
    "gradient",
    "load_store",
    "nearest_target",
    "optimize",
    "prepare_state",
    "psr_partial",
    "random_parameters",
    "sample_random_state",
    "save_store",
    "train_tree",
    "warm_start_optimize",
    "zero_state",
]
