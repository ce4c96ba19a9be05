"""Hierarchical target clustering with centroid flooding.

build_tree recursively k-means-partitions the targets (embedded as
real/imag coordinate vectors) down to a fixed depth or singleton clusters;
every node carries the renormalized mean of its members as a centroid state.
train_tree then optimizes top-down: the root centroid from a cold start,
every other node's centroid warm-started from its parent's optimum, and
finally each member target warm-started from its leaf's optimum, so one
cold run floods the whole tree.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from .ansatz import AnsatzSpec
from .errors import ConfigError
from .metrics import distance
from .optimizer import (
    OptimizationRecord,
    OptimizerConfig,
    optimize,
    random_parameters,
)
from .seeding import derive_seed
from .statevector import QuantumState

MEAN_NORM_FLOOR = 1e-9


@dataclass
class TreeConfig:
    depth: int = 2
    branching: int = 2
    cluster_seed: int = 0
    max_kmeans_iters: int = 50

    def __post_init__(self):
        if self.depth < 0:
            raise ConfigError(f"depth must be >= 0, got {self.depth}")
        if self.branching < 2:
            raise ConfigError(f"branching must be >= 2, got {self.branching}")
        if self.max_kmeans_iters < 1:
            raise ConfigError(
                f"max_kmeans_iters must be >= 1, got {self.max_kmeans_iters}"
            )


@dataclass
class TreeNode:
    node_id: int
    level: int
    centroid: QuantumState
    children: List["TreeNode"] = field(default_factory=list)
    leaf_targets: List[int] = field(default_factory=list)
    optimized: Optional[OptimizationRecord] = None

    @property
    def is_leaf(self) -> bool:
        return not self.children


def _embed(states: Sequence[QuantumState]) -> np.ndarray:
    amps = np.stack([s.amplitudes for s in states])
    return np.concatenate([amps.real, amps.imag], axis=1)


def _centroid_state(members: Sequence[QuantumState]) -> QuantumState:
    """Renormalized entrywise mean; medoid if the mean collapses to zero."""
    n = members[0].num_qubits
    mean = np.mean([s.amplitudes for s in members], axis=0)
    norm = np.linalg.norm(mean)
    if norm < MEAN_NORM_FLOOR:
        sums = [
            sum(distance(a, b) for b in members) for a in members
        ]
        return members[int(np.argmin(sums))]
    return QuantumState(n, mean / norm)


def _kmeans_labels(
    points: np.ndarray, k: int, rng: np.random.Generator, max_iters: int
) -> np.ndarray:
    """Seeded Lloyd iteration with farthest-point initialization."""
    count = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[int(rng.integers(count))]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        centers[j] = points[int(np.argmax(d2))]
        d2 = np.minimum(d2, ((points - centers[j]) ** 2).sum(axis=1))
    labels = np.full(count, -1, dtype=int)
    for _iteration in range(max_iters):
        dist2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = dist2.argmin(axis=1)
        for j in range(k):
            if not np.any(new_labels == j):
                # steal the point farthest from its assigned center
                own = dist2[np.arange(count), new_labels]
                donor = int(np.argmax(own))
                new_labels[donor] = j
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            centers[j] = points[labels == j].mean(axis=0)
    return labels


def build_tree(targets: Sequence[QuantumState], config: TreeConfig) -> TreeNode:
    """Cluster targets into a depth-bounded tree; leaves own the target ids."""
    if len(targets) == 0:
        raise ConfigError("targets must be non-empty")
    n = targets[0].num_qubits
    for i, t in enumerate(targets):
        if t.num_qubits != n:
            raise ConfigError(f"target {i} has {t.num_qubits} qubits, expected {n}")
    points = _embed(targets)
    counter = {"next_id": 0}

    def make_node(member_ids: List[int], level: int) -> TreeNode:
        node = TreeNode(
            node_id=counter["next_id"],
            level=level,
            centroid=_centroid_state([targets[i] for i in member_ids]),
        )
        counter["next_id"] += 1
        if level >= config.depth or len(member_ids) == 1:
            node.leaf_targets = list(member_ids)
            return node
        k = min(config.branching, len(member_ids))
        rng = np.random.default_rng(
            derive_seed(config.cluster_seed, "kmeans", node.node_id)
        )
        labels = _kmeans_labels(
            points[member_ids], k, rng, config.max_kmeans_iters
        )
        for j in range(k):
            child_ids = [member_ids[i] for i in np.flatnonzero(labels == j)]
            node.children.append(make_node(child_ids, level + 1))
        return node

    return make_node(list(range(len(targets))), 0)


def iter_nodes(root: TreeNode):
    """Breadth-first node iteration (parents always before children)."""
    queue = [root]
    while queue:
        node = queue.pop(0)
        yield node
        queue.extend(node.children)


@dataclass
class TreeTraining:
    root: TreeNode
    node_records: Dict[int, OptimizationRecord]
    target_records: Dict[int, OptimizationRecord]
    audit: List[dict]

    def total_iterations(self) -> int:
        return sum(r.n_iter for r in self.node_records.values()) + sum(
            r.n_iter for r in self.target_records.values()
        )

    def total_qe(self) -> int:
        return sum(r.qe_total for r in self.node_records.values()) + sum(
            r.qe_total for r in self.target_records.values()
        )


def train_tree(
    root: TreeNode,
    targets: Sequence[QuantumState],
    spec: AnsatzSpec,
    config: OptimizerConfig = None,
    seed: int = 0,
) -> TreeTraining:
    """Flood the tree: root cold, everything below warm from its parent."""
    if config is None:
        config = OptimizerConfig()
    node_records: Dict[int, OptimizationRecord] = {}
    target_records: Dict[int, OptimizationRecord] = {}
    audit: List[dict] = []
    parents = {root.node_id: None}

    for node in iter_nodes(root):
        parent_id = parents[node.node_id]
        for child in node.children:
            parents[child.node_id] = node.node_id
        if parent_id is None:
            theta0 = random_parameters(
                spec.param_count, derive_seed(seed, "tree-root-init")
            )
            provenance = "cold"
        else:
            theta0 = node_records[parent_id].final_theta
            provenance = "tree_parent"
        record = optimize(
            spec,
            theta0,
            node.centroid,
            config,
            seed=derive_seed(seed, "tree-node", node.node_id),
            init_provenance=provenance,
        )
        node.optimized = record
        node_records[node.node_id] = record
        audit.append(
            {"seq": len(audit), "node": node.node_id, "parent": parent_id}
        )

    for node in iter_nodes(root):
        if not node.is_leaf:
            continue
        for tid in node.leaf_targets:
            record = optimize(
                spec,
                node_records[node.node_id].final_theta,
                targets[tid],
                config,
                seed=derive_seed(seed, "tree-target", tid),
                init_provenance="tree_parent",
            )
            target_records[tid] = record
            audit.append(
                {"seq": len(audit), "target": tid, "parent": node.node_id}
            )

    return TreeTraining(
        root=root,
        node_records=node_records,
        target_records=target_records,
        audit=audit,
    )
