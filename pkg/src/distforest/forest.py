"""Forest fitting on resampled training sets and per-query forest weights.

The forest turns shared leaf membership into probability weights over the
training rows: each qualifying tree contributes 1/(B' * |leaf|) to every row
in the leaf that contains the query, where B' counts the qualifying trees.
Out-of-bag mode restricts the qualifying trees to those whose resample
excluded a given training row.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, as_feature_values
from .tree import Tree, TreeConfig, fit_tree, leaf_of, tree_leaf_assignments, tree_predict_mean

RESAMPLING_MODES = ("subsample", "bootstrap")


class NoOobTreesError(RuntimeError):
    """Raised when an out-of-bag query has no tree excluding the observation."""


@dataclass(frozen=True)
class ForestConfig:
    num_trees: int = 2000
    resampling: str = "subsample"
    fraction: float = 0.5
    tree: TreeConfig = TreeConfig()
    seed: int = 0

    def __post_init__(self):
        if self.num_trees < 1:
            raise ValueError("num_trees must be >= 1")
        if self.resampling not in RESAMPLING_MODES:
            raise ValueError(f"resampling must be one of {RESAMPLING_MODES}")
        if not (0.0 < self.fraction <= 1.0):
            raise ValueError("fraction must be in (0, 1]")


@dataclass
class Forest:
    trees: list[Tree]
    config: ForestConfig
    dataset_fingerprint: str
    num_rows: int


@dataclass
class WeightVector:
    """Sparse probability weights over training indices for one query point.

    Empty (num_qualifying_trees == 0) only in out-of-bag mode, when every
    tree's resample contained the excluded observation.
    """

    weights: dict[int, float]
    query: np.ndarray
    excluded_index: int | None = None
    num_qualifying_trees: int = 0

    @property
    def mode(self) -> str:
        return "all_trees" if self.excluded_index is None else "oob"

    @property
    def is_empty(self) -> bool:
        return self.num_qualifying_trees == 0

    def total(self) -> float:
        return float(sum(self.weights.values()))


def _tree_rng(seed: int, tree_index: int) -> np.random.Generator:
    return np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, tree_index])


def _draw_subsample(n: int, config: ForestConfig, rng: np.random.Generator) -> np.ndarray:
    if config.resampling == "bootstrap":
        idx = rng.integers(0, n, size=n)
    else:
        size = min(n, max(1, int(round(config.fraction * n))))
        idx = rng.choice(n, size=size, replace=False)
    return np.sort(idx).astype(np.intp)


def fit_forest(data: Dataset, config: ForestConfig) -> Forest:
    """Fit num_trees trees, each on its own resample of the training rows.

    Every tree gets an independent generator derived from (seed, tree index),
    so the fit is reproducible and trees could be grown in parallel.
    """
    trees: list[Tree] = []
    for b in range(config.num_trees):
        rng = _tree_rng(config.seed, b)
        subsample = _draw_subsample(data.n, config, rng)
        trees.append(fit_tree(data, subsample, config.tree, rng))
    return Forest(
        trees=trees,
        config=config,
        dataset_fingerprint=data.fingerprint(),
        num_rows=data.n,
    )


def _add_leaf_contribution(acc: np.ndarray, members: np.ndarray) -> None:
    # Members may repeat under bootstrap resampling; each occurrence counts.
    uniq, counts = np.unique(members, return_counts=True)
    acc[uniq] += counts / members.size


def _finish_weights(
    acc: np.ndarray, qualifying: int, query: np.ndarray, excluded_index: int | None
) -> WeightVector:
    acc /= qualifying
    support = np.nonzero(acc)[0]
    return WeightVector(
        weights={int(i): float(acc[i]) for i in support},
        query=query,
        excluded_index=excluded_index,
        num_qualifying_trees=qualifying,
    )


def forest_weights(forest: Forest, data: Dataset, x, excluded_index: int | None = None) -> WeightVector:
    """Probability weights over training rows for the query x.

    With excluded_index set (out-of-bag mode), only trees whose resample
    excluded that row contribute; raises NoOobTreesError when none qualify.
    """
    values = as_feature_values(x)
    acc = np.zeros(data.n)
    qualifying = 0
    for tree in forest.trees:
        if excluded_index is not None and np.any(tree.subsample == excluded_index):
            continue
        qualifying += 1
        members = tree.nodes[leaf_of(tree, values)].members
        _add_leaf_contribution(acc, members)
    if qualifying == 0:
        raise NoOobTreesError("no out-of-bag trees for observation")
    return _finish_weights(acc, qualifying, values.copy(), excluded_index)


def predict_mean(forest: Forest, data: Dataset, x) -> float:
    """Point prediction: the average of the per-tree leaf means.

    Equals the weight-weighted response sum from forest_weights up to float
    rounding; the two are computed through independent paths.
    """
    values = as_feature_values(x)
    total = 0.0
    for tree in forest.trees:
        total += tree_predict_mean(tree, values, data)
    return total / len(forest.trees)


def oob_weights_all(forest: Forest, data: Dataset) -> list[WeightVector]:
    """Out-of-bag weight vectors for every training row.

    Rows that appear in every tree's resample come back flagged empty rather
    than silently averaged over in-bag trees.
    """
    n = data.n
    in_bag = np.zeros((len(forest.trees), n), dtype=bool)
    for b, tree in enumerate(forest.trees):
        in_bag[b, tree.subsample] = True
    assignments = [tree_leaf_assignments(tree, data.features) for tree in forest.trees]

    out: list[WeightVector] = []
    for i in range(n):
        acc = np.zeros(n)
        qualifying = 0
        for b, tree in enumerate(forest.trees):
            if in_bag[b, i]:
                continue
            qualifying += 1
            members = tree.nodes[assignments[b][i]].members
            _add_leaf_contribution(acc, members)
        query = data.features[i].copy()
        if qualifying == 0:
            out.append(WeightVector(weights={}, query=query, excluded_index=i, num_qualifying_trees=0))
        else:
            out.append(_finish_weights(acc, qualifying, query, i))
    return out
