"""Model persistence: a self-describing JSON document holding the forest
config, the training-data fingerprint and every tree (nodes, thresholds,
leaf member indices, subsamples). Round-trip load reproduces identical
predictions; saves are byte-identical for a fixed fit.
"""
from __future__ import annotations

import json
import math
import warnings

import numpy as np

from .data import Dataset
from .forest import Forest, ForestConfig
from .tree import Node, Tree, TreeConfig

MODEL_FORMAT = "distforest-model/v1"


class ModelFormatError(ValueError):
    pass


def _tree_to_doc(tree: Tree) -> dict:
    nodes = []
    for node in tree.nodes:
        if node.is_leaf:
            nodes.append({"members": [int(i) for i in node.members]})
        else:
            nodes.append(
                {
                    "feature": int(node.feature),
                    "threshold": float(node.threshold),
                    "left": int(node.left),
                    "right": int(node.right),
                }
            )
    return {"nodes": nodes, "subsample": [int(i) for i in tree.subsample]}


def _tree_from_doc(doc: dict, num_rows: int) -> Tree:
    try:
        raw_nodes = doc["nodes"]
        subsample = np.asarray(doc["subsample"], dtype=np.intp)
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"corrupt model file: {exc}") from exc
    nodes: list[Node] = []
    for raw in raw_nodes:
        if "members" in raw:
            members = np.asarray(raw["members"], dtype=np.intp)
            if members.size == 0 or members.min() < 0 or members.max() >= num_rows:
                raise ModelFormatError("corrupt model file: leaf members out of range")
            nodes.append(Node(members=members))
        else:
            try:
                node = Node(
                    feature=int(raw["feature"]),
                    threshold=float(raw["threshold"]),
                    left=int(raw["left"]),
                    right=int(raw["right"]),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ModelFormatError(f"corrupt model file: {exc}") from exc
            if not (0 <= node.left < len(raw_nodes)) or not (0 <= node.right < len(raw_nodes)):
                raise ModelFormatError("corrupt model file: node child out of range")
            nodes.append(node)
    if not nodes:
        raise ModelFormatError("corrupt model file: empty tree")
    return Tree(nodes=nodes, subsample=subsample)


def save_model(forest: Forest, path) -> None:
    tree_cfg = forest.config.tree
    doc = {
        "format": MODEL_FORMAT,
        "config": {
            "num_trees": forest.config.num_trees,
            "resampling": forest.config.resampling,
            "fraction": forest.config.fraction,
            "seed": forest.config.seed,
            "tree": {
                "min_leaf_size": tree_cfg.min_leaf_size,
                "max_depth": tree_cfg.max_depth,
                "mtry": tree_cfg.mtry,
                "split_criterion": tree_cfg.split_criterion,
            },
        },
        "dataset_fingerprint": forest.dataset_fingerprint,
        "num_rows": forest.num_rows,
        "trees": [_tree_to_doc(tree) for tree in forest.trees],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, separators=(",", ":"), allow_nan=False)


def load_model(path, expected_dataset: Dataset | None = None) -> Forest:
    """Load a saved forest; unknown extra fields are ignored (the format is
    forward-tolerant). A fingerprint mismatch against an expected dataset is
    surfaced as a warning, not an error - callers decide how strict to be.
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError("corrupt model file") from exc
    if not isinstance(doc, dict) or "format" not in doc:
        raise ModelFormatError("corrupt model file: missing format tag")
    if doc["format"] != MODEL_FORMAT:
        raise ModelFormatError(f"unsupported model format: {doc['format']!r}")
    try:
        cfg = doc["config"]
        tree_cfg = cfg["tree"]
        config = ForestConfig(
            num_trees=int(cfg["num_trees"]),
            resampling=str(cfg["resampling"]),
            fraction=float(cfg["fraction"]),
            seed=int(cfg["seed"]),
            tree=TreeConfig(
                min_leaf_size=int(tree_cfg["min_leaf_size"]),
                max_depth=None if tree_cfg["max_depth"] is None else int(tree_cfg["max_depth"]),
                mtry=int(tree_cfg["mtry"]),
                split_criterion=str(tree_cfg["split_criterion"]),
            ),
        )
        num_rows = int(doc["num_rows"])
        fingerprint = str(doc["dataset_fingerprint"])
        raw_trees = doc["trees"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"corrupt model file: {exc}") from exc
    if len(raw_trees) != config.num_trees:
        raise ModelFormatError("corrupt model file: tree count does not match config")
    trees = [_tree_from_doc(raw, num_rows) for raw in raw_trees]
    for tree in trees:
        for node in tree.nodes:
            if not node.is_leaf and math.isnan(node.threshold):
                raise ModelFormatError("corrupt model file: split without threshold")
    forest = Forest(trees=trees, config=config, dataset_fingerprint=fingerprint, num_rows=num_rows)
    if expected_dataset is not None and expected_dataset.fingerprint() != fingerprint:
        warnings.warn(
            "model was trained on a different dataset (fingerprint mismatch)",
            UserWarning,
            stacklevel=2,
        )
    return forest
