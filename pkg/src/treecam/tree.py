"""Binary classification trees: CART training, traversal, and the JSON
interchange format used to move trees between tools."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset

INTERCHANGE_VERSION = 1

LEAF = -1  # feature index marking a leaf node


class TreeError(ValueError):
    """Raised for malformed trees or interchange documents."""


@dataclass(frozen=True)
class DecisionTree:
    """Arena-style binary decision tree.

    Node ``i`` is internal when ``feature[i] >= 0``: inputs with
    ``x[feature[i]] <= threshold[i]`` descend to ``left[i]``, the rest to
    ``right[i]``. Leaves have ``feature[i] == LEAF`` and carry
    ``class_index[i]``. The root is node 0.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    class_index: np.ndarray
    feature_names: tuple[str, ...]
    class_names: tuple[str, ...]

    def __post_init__(self):
        self.validate()

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def is_leaf(self, i: int) -> bool:
        return self.feature[i] == LEAF

    def n_leaves(self) -> int:
        return int(np.sum(self.feature == LEAF))

    def depth(self) -> int:
        def rec(i, d):
            if self.is_leaf(i):
                return d
            return max(rec(self.left[i], d + 1), rec(self.right[i], d + 1))

        return rec(0, 0)

    def validate(self) -> None:
        """Check node references are in range and the graph is a rooted tree."""
        n = self.n_nodes
        if n == 0:
            raise TreeError("empty tree")
        seen = set()

        def rec(i):
            if not 0 <= i < n:
                raise TreeError(f"dangling node reference {i}")
            if i in seen:
                raise TreeError(f"node {i} reachable twice (cycle or DAG)")
            seen.add(i)
            if self.feature[i] == LEAF:
                if not 0 <= self.class_index[i] < len(self.class_names):
                    raise TreeError(f"leaf {i} has invalid class {self.class_index[i]}")
            else:
                if not 0 <= self.feature[i] < len(self.feature_names):
                    raise TreeError(f"node {i} has invalid feature {self.feature[i]}")
                rec(self.left[i])
                rec(self.right[i])

        rec(0)


def predict(tree: DecisionTree, x) -> int:
    """Golden-oracle traversal: descend with <=/> semantics, return the leaf class."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (len(tree.feature_names),):
        raise TreeError(f"input has {x.shape} values, tree expects {len(tree.feature_names)}")
    i = 0
    while not tree.is_leaf(i):
        i = tree.left[i] if x[tree.feature[i]] <= tree.threshold[i] else tree.right[i]
    return int(tree.class_index[i])


def predict_batch(tree: DecisionTree, rows: np.ndarray) -> np.ndarray:
    return np.array([predict(tree, r) for r in rows], dtype=np.int64)


@dataclass
class CartParams:
    max_depth: int | None = None
    min_samples_leaf: int = 1
    min_samples_split: int = 2


def _gini_gain(y: np.ndarray, n_classes: int, order: np.ndarray, values: np.ndarray):
    """Best (gain, threshold) for one presorted feature column, or None.

    Candidate thresholds are midpoints between consecutive distinct values;
    ties on gain resolve to the smallest threshold.
    """
    n = len(y)
    sorted_vals = values[order]
    counts = np.zeros((n, n_classes), dtype=np.int64)
    counts[np.arange(n), y[order]] = 1
    prefix = np.cumsum(counts, axis=0)  # prefix[k] = class counts of first k+1
    total = prefix[-1]

    # split after position k (left size k+1) is valid only between distinct values
    ks = np.nonzero(sorted_vals[:-1] < sorted_vals[1:])[0]
    if len(ks) == 0:
        return None
    n_left = ks + 1.0
    n_right = n - n_left
    left = prefix[ks]
    right = total - left
    gini_left = 1.0 - np.sum((left / n_left[:, None]) ** 2, axis=1)
    gini_right = 1.0 - np.sum((right / n_right[:, None]) ** 2, axis=1)
    parent = 1.0 - np.sum((total / n) ** 2)
    gain = parent - (n_left / n) * gini_left - (n_right / n) * gini_right
    best = int(np.argmax(gain))  # first (smallest threshold) among exact ties
    k = ks[best]
    thr = 0.5 * (sorted_vals[k] + sorted_vals[k + 1])
    return float(gain[best]), float(thr), int(k + 1)


def train_cart(train: Dataset, params: CartParams | None = None) -> DecisionTree:
    """Grow a CART tree by greedy Gini-impurity splitting.

    Deterministic by construction: candidate thresholds are midpoints of
    consecutive distinct sorted values, ties break on the lowest feature
    index then the smallest threshold, and leaves take the majority class
    (lowest index on ties).
    """
    if not len(train):
        raise TreeError("cannot train on an empty dataset")
    params = params or CartParams()
    X, y = train.rows, train.labels
    n_classes = train.n_classes

    feature, threshold, left, right, class_index = [], [], [], [], []

    def new_node():
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        class_index.append(0)
        return len(feature) - 1

    def majority(idx):
        return int(np.argmax(np.bincount(y[idx], minlength=n_classes)))

    def grow(idx: np.ndarray, depth: int) -> int:
        node = new_node()
        class_index[node] = majority(idx)
        pure = len(np.unique(y[idx])) == 1
        depth_ok = params.max_depth is None or depth < params.max_depth
        if pure or not depth_ok or len(idx) < params.min_samples_split:
            return node

        best = None  # (gain, feat, thr, left_size)
        for f in range(train.n_features):
            col = X[idx, f]
            order = np.argsort(col, kind="stable")
            found = _gini_gain(y[idx], n_classes, order, col)
            if found is None:
                continue
            gain, thr, _ = found
            # lowest feature index wins ties: strict improvement required
            if best is None or gain > best[0] + 1e-15:
                mask = col <= thr
                n_l = int(mask.sum())
                if min(n_l, len(idx) - n_l) >= params.min_samples_leaf:
                    best = (gain, f, thr, mask)
        if best is None or best[0] <= 1e-15:
            return node

        _, f, thr, mask = best
        feature[node] = f
        threshold[node] = thr
        left[node] = grow(idx[mask], depth + 1)
        right[node] = grow(idx[~mask], depth + 1)
        return node

    root = grow(np.arange(len(train)), 0)
    assert root == 0
    return DecisionTree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        class_index=np.asarray(class_index, dtype=np.int64),
        feature_names=train.feature_names,
        class_names=train.class_names,
    )


# --- interchange -----------------------------------------------------------

def export_tree(tree: DecisionTree) -> str:
    """Serialize a tree to the versioned JSON interchange document."""
    nodes = []
    for i in range(tree.n_nodes):
        if tree.is_leaf(i):
            nodes.append({"type": "leaf", "class": int(tree.class_index[i])})
        else:
            nodes.append({
                "type": "split",
                "feature": int(tree.feature[i]),
                "threshold": float(tree.threshold[i]),
                "left": int(tree.left[i]),
                "right": int(tree.right[i]),
            })
    doc = {
        "version": INTERCHANGE_VERSION,
        "feature_names": list(tree.feature_names),
        "class_names": list(tree.class_names),
        "nodes": nodes,
    }
    return json.dumps(doc, indent=2)


def import_tree(text: str | bytes) -> DecisionTree:
    """Parse an interchange document back into a :class:`DecisionTree`.

    Round-trips are exact: topology and thresholds are reproduced
    bit-identically.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TreeError(f"malformed interchange document: {exc}") from exc
    if not isinstance(doc, dict):
        raise TreeError("interchange document must be an object")
    if doc.get("version") != INTERCHANGE_VERSION:
        raise TreeError(f"unknown interchange version {doc.get('version')!r}")
    for key in ("feature_names", "class_names", "nodes"):
        if key not in doc:
            raise TreeError(f"interchange document missing {key!r}")
    nodes = doc["nodes"]
    if not nodes:
        raise TreeError("interchange document has no nodes")

    n = len(nodes)
    feature = np.full(n, LEAF, dtype=np.int64)
    threshold = np.zeros(n, dtype=np.float64)
    left = np.full(n, -1, dtype=np.int64)
    right = np.full(n, -1, dtype=np.int64)
    class_index = np.zeros(n, dtype=np.int64)
    for i, node in enumerate(nodes):
        kind = node.get("type")
        if kind == "leaf":
            class_index[i] = int(node["class"])
        elif kind == "split":
            feature[i] = int(node["feature"])
            threshold[i] = float(node["threshold"])
            left[i] = int(node["left"])
            right[i] = int(node["right"])
        else:
            raise TreeError(f"node {i} has unknown type {kind!r}")
    return DecisionTree(
        feature=feature,
        threshold=threshold,
        left=left,
        right=right,
        class_index=class_index,
        feature_names=tuple(doc["feature_names"]),
        class_names=tuple(doc["class_names"]),
    )
