"""Single regression trees: recursive binary splitting on a subsample with a
variance-reduction criterion, and leaf lookup for query points.

Leaves keep the training indices that fell into them, so a fitted tree can be
read as a partition of its subsample into neighborhoods.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, NUM_FEATURES, as_feature_values

# Guards against float noise turning an exactly-zero variance reduction (e.g.
# constant responses) into a spurious split.
_MIN_GAIN = 1e-12

# Gains within one part in 1e9 are treated as equal, so the documented
# tie-break (lowest feature, then lowest threshold) is honored even when two
# candidates induce the same partition and differ only by rounding.
_REL_TIE = 1e-9


@dataclass(frozen=True)
class TreeConfig:
    min_leaf_size: int = 5
    max_depth: int | None = None
    mtry: int = 3
    split_criterion: str = "variance_reduction"

    def __post_init__(self):
        if self.min_leaf_size < 1:
            raise ValueError("min_leaf_size must be >= 1")
        if not (1 <= self.mtry <= NUM_FEATURES):
            raise ValueError(f"mtry must be in [1, {NUM_FEATURES}]")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError("max_depth must be None or >= 0")
        if self.split_criterion != "variance_reduction":
            raise ValueError(f"unknown split criterion: {self.split_criterion}")


@dataclass(frozen=True)
class SplitDecision:
    feature: int
    threshold: float
    criterion_gain: float
    left_count: int
    right_count: int


@dataclass
class Node:
    """Arena node: internal (feature/threshold/children) or leaf (members)."""

    feature: int = -1
    threshold: float = math.nan
    left: int = -1
    right: int = -1
    members: np.ndarray | None = None

    @property
    def is_leaf(self) -> bool:
        return self.left < 0


@dataclass
class Tree:
    """Fitted regression tree over a subsample of training indices.

    nodes[0] is the root; leaf members partition the subsample (as a
    multiset when the subsample was drawn with replacement).
    """

    nodes: list[Node] = field(default_factory=list)
    subsample: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.intp))

    def leaf_ids(self) -> list[int]:
        return [i for i, node in enumerate(self.nodes) if node.is_leaf]


def best_split(rows, data: Dataset, candidate_features, config: TreeConfig) -> SplitDecision | None:
    """Exhaustive best variance-reduction split over the candidate features.

    Thresholds are the midpoints between consecutive distinct observed values.
    Returns None when no candidate yields a positive gain with at least
    min_leaf_size rows on each side. Ties (gains equal up to relative _REL_TIE)
    resolve to the lowest feature index, then the lowest threshold.
    """
    rows = np.asarray(rows, dtype=np.intp)
    n = rows.size
    if n == 0:
        raise ValueError("best_split requires a non-empty row set")
    min_leaf = config.min_leaf_size
    if n < 2 * min_leaf:
        return None
    y = data.responses[rows]
    centered = y - y.mean()
    parent_var = float(np.mean(centered * centered))
    # The gain Var(parent) - (nL/n) Var(L) - (nR/n) Var(R) equals the
    # between-group variance (nL/n)(mL-m)^2 + (nR/n)(mR-m)^2, which is
    # non-negative by construction and cheap via cumulative sums.
    best: SplitDecision | None = None
    for f in sorted(set(int(f) for f in candidate_features)):
        x = data.features[rows, f]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        left_sums = np.cumsum(centered[order])
        total = left_sums[-1]
        left_n = np.arange(1, n)
        ok = (xs[1:] > xs[:-1]) & (left_n >= min_leaf) & ((n - left_n) >= min_leaf)
        if not ok.any():
            continue
        pos = np.nonzero(ok)[0]  # split between xs[pos] and xs[pos + 1]
        n_left = (pos + 1).astype(float)
        n_right = n - n_left
        s_left = left_sums[pos]
        s_right = total - s_left
        gains = s_left * s_left / (n * n_left) + s_right * s_right / (n * n_right)
        gain_max = float(gains.max())
        if gain_max <= _MIN_GAIN * max(1.0, parent_var):
            continue
        # lowest threshold within the tie band around the maximum gain
        j = int(np.argmax(gains >= gain_max * (1.0 - _REL_TIE)))
        gain = float(gains[j])
        if best is None or gain > best.criterion_gain * (1.0 + _REL_TIE):
            p = int(pos[j])
            best = SplitDecision(
                feature=f,
                threshold=float((xs[p] + xs[p + 1]) / 2.0),
                criterion_gain=gain,
                left_count=int(n_left[j]),
                right_count=int(n_right[j]),
            )
    return best


def fit_tree(data: Dataset, subsample, config: TreeConfig, rng: np.random.Generator) -> Tree:
    """Grow a tree on the given subsample by recursive binary splitting.

    At each node, mtry candidate features are drawn without replacement from
    rng; a branch stops when the node is smaller than 2 * min_leaf_size, the
    depth limit is reached, or no split has positive gain. Deterministic for
    a fixed (data, subsample, config, rng seed).
    """
    subsample = np.asarray(subsample, dtype=np.intp)
    if subsample.size == 0:
        raise ValueError("empty training subsample")
    nodes: list[Node] = []
    features = data.features

    def grow(rows: np.ndarray, depth: int) -> int:
        node_id = len(nodes)
        nodes.append(Node())
        decision = None
        depth_ok = config.max_depth is None or depth < config.max_depth
        if depth_ok and rows.size >= 2 * config.min_leaf_size:
            candidates = np.sort(rng.choice(NUM_FEATURES, size=config.mtry, replace=False))
            decision = best_split(rows, data, candidates, config)
        if decision is None:
            nodes[node_id] = Node(members=rows)
            return node_id
        go_left = features[rows, decision.feature] <= decision.threshold
        left_id = grow(rows[go_left], depth + 1)
        right_id = grow(rows[~go_left], depth + 1)
        nodes[node_id] = Node(
            feature=decision.feature,
            threshold=decision.threshold,
            left=left_id,
            right=right_id,
        )
        return node_id

    grow(subsample, 0)
    return Tree(nodes=nodes, subsample=subsample)


def leaf_of(tree: Tree, x) -> int:
    """Id of the leaf whose region contains x (ties on a threshold go left)."""
    values = as_feature_values(x)
    node_id = 0
    node = tree.nodes[0]
    while not node.is_leaf:
        node_id = node.left if values[node.feature] <= node.threshold else node.right
        node = tree.nodes[node_id]
    return node_id


def tree_predict_mean(tree: Tree, x, data: Dataset) -> float:
    """Mean response over the leaf neighborhood that contains x."""
    members = tree.nodes[leaf_of(tree, x)].members
    return float(np.mean(data.responses[members]))


def tree_leaf_assignments(tree: Tree, features: np.ndarray) -> np.ndarray:
    """Leaf id for every row of a feature matrix (batch version of leaf_of)."""
    features = np.asarray(features, dtype=float)
    out = np.empty(features.shape[0], dtype=np.intp)
    stack: list[tuple[int, np.ndarray]] = [(0, np.arange(features.shape[0], dtype=np.intp))]
    while stack:
        node_id, idx = stack.pop()
        node = tree.nodes[node_id]
        if node.is_leaf:
            out[idx] = node_id
            continue
        go_left = features[idx, node.feature] <= node.threshold
        stack.append((node.left, idx[go_left]))
        stack.append((node.right, idx[~go_left]))
    return out
