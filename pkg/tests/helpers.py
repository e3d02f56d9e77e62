"""Shared builders for the test suite: seeded random trees whose paths are
consistent by construction, plus synthetic LUTs and datasets."""

from __future__ import annotations

import numpy as np

from treecam.dataset import Dataset
from treecam.encoding import FeatureCodebook, TernaryLUT
from treecam.tree import DecisionTree, predict_batch


def random_tree(n_leaves: int, n_features: int, seed: int,
                n_classes: int = 3) -> DecisionTree:
    """Random binary tree over [0,1]^n_features.

    Each split picks a threshold strictly inside the node's box, so every
    root-to-leaf path has non-empty interval rules.
    """
    rng = np.random.default_rng(seed)
    feature, threshold, left, right, cls = [], [], [], [], []

    def new():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        cls.append(0)
        return len(feature) - 1

    def grow(box, leaves):
        node = new()
        if leaves == 1:
            cls[node] = int(rng.integers(0, n_classes))
            return node
        f = int(rng.integers(0, n_features))
        lo, hi = box[f]
        feature[node] = f
        threshold[node] = lo + (hi - lo) * rng.uniform(0.2, 0.8)
        n_left = int(rng.integers(1, leaves))
        lbox = list(box)
        lbox[f] = (lo, threshold[node])
        left[node] = grow(lbox, n_left)
        rbox = list(box)
        rbox[f] = (threshold[node], hi)
        right[node] = grow(rbox, leaves - n_left)
        return node

    grow([(0.0, 1.0)] * n_features, n_leaves)
    return DecisionTree(
        np.array(feature), np.array(threshold), np.array(left),
        np.array(right), np.array(cls),
        tuple(f"f{i}" for i in range(n_features)),
        tuple(f"c{i}" for i in range(n_classes)),
    )


def random_dataset_for(tree: DecisionTree, n: int, seed: int) -> Dataset:
    """Uniform random inputs labeled by the tree itself."""
    rng = np.random.default_rng(seed)
    X = rng.random((n, len(tree.feature_names)))
    return Dataset(tree.feature_names, X, predict_batch(tree, X),
                   tree.class_names)


def wide_margin_tree(depth: int = 7) -> DecisionTree:
    """Complete tree, one fresh feature per node, every threshold at 0.5.

    Inputs drawn near 0.25/0.75 sit far from every threshold, isolating
    sense-amplifier variability from input-noise effects.
    """
    n_internal = 2 ** depth - 1
    n = 2 ** (depth + 1) - 1
    feature = np.full(n, -1)
    threshold = np.zeros(n)
    left = np.full(n, -1)
    right = np.full(n, -1)
    cls = np.zeros(n, dtype=np.int64)
    for i in range(n_internal):
        feature[i] = i
        threshold[i] = 0.5
        left[i], right[i] = 2 * i + 1, 2 * i + 2
    for j, i in enumerate(range(n_internal, n)):
        cls[i] = j % 3
    return DecisionTree(
        feature, threshold, left, right, cls,
        tuple(f"f{i}" for i in range(n_internal)), ("a", "b", "c"))


def wide_margin_inputs(tree: DecisionTree, n: int, seed: int) -> Dataset:
    rng = np.random.default_rng(seed)
    n_feat = len(tree.feature_names)
    X = np.where(rng.random((n, n_feat)) < 0.5, 0.25, 0.75)
    X = X + rng.uniform(-0.05, 0.05, X.shape)
    return Dataset(tree.feature_names, X, predict_batch(tree, X),
                   tree.class_names)


def synthetic_lut(m: int, width: int, seed: int, n_classes: int = 2,
                  p=(0.35, 0.35, 0.30)) -> TernaryLUT:
    """Random {0,1,x} grid (not tree-backed; rows need not partition space)."""
    rng = np.random.default_rng(seed)
    grid = rng.choice(list("01x"), p=list(p), size=(m, width))
    cb = FeatureCodebook([np.arange(1, width, dtype=np.float64)])
    return TernaryLUT(rows=["".join(r) for r in grid],
                      classes=[int(c) for c in rng.integers(0, n_classes, m)],
                      codebook=cb,
                      class_names=tuple(f"c{i}" for i in range(n_classes)))


def random_bits(n: int, width: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).integers(0, 2, size=(n, width)).astype(np.uint8)
