"""Export fitted scikit-learn decision trees to the interchange format.

The output is the versioned JSON document the array-compilation toolchain
imports: a flat node list with root at index 0, splits carrying a feature
index, a full-precision threshold and left/right child indices, and leaves
carrying a class index. Split semantics are identical on both sides
(value <= threshold goes left), so exported trees predict exactly like the
original model.
"""

from __future__ import annotations

import json
import pickle
from pathlib import Path

import numpy as np

INTERCHANGE_VERSION = 1


class ExportError(ValueError):
    pass


def _fitted_tree(model):
    """Validate the model and return its low-level tree structure."""
    if isinstance(model, type):
        raise ExportError("model is a class, not a fitted instance")
    tree = getattr(model, "tree_", None)
    if not hasattr(model, "predict") or not hasattr(model, "get_params"):
        raise ExportError(f"{type(model).__name__} is not an estimator")
    if tree is None:
        if hasattr(model, "estimators_") or type(model).__name__.endswith(
                ("Forest", "Boosting")):
            raise ExportError("ensemble models are not supported; "
                              "export a single tree")
        raise ExportError("model has no fitted tree structure; "
                          "call fit() first or pass a tree classifier")
    if getattr(model, "n_outputs_", 1) != 1:
        raise ExportError("multi-output trees are not supported")
    if not hasattr(model, "classes_"):
        raise ExportError("model is not a classifier")
    return tree


def tree_document(model, feature_names=None, class_names=None) -> dict:
    """Build the interchange document for a fitted single-tree classifier.

    Leaf classes come from the argmax of the training class counts; count
    ties resolve to the lowest class index, matching the toolchain's own
    trainer so differential tests are exact.
    """
    t = _fitted_tree(model)
    n_features = int(model.n_features_in_)
    classes = list(model.classes_)

    if feature_names is None:
        feature_names = [f"f{i}" for i in range(n_features)]
    if class_names is None:
        class_names = [str(c) for c in classes]
    if len(feature_names) != n_features:
        raise ExportError(f"expected {n_features} feature names, "
                          f"got {len(feature_names)}")
    if len(class_names) != len(classes):
        raise ExportError(f"expected {len(classes)} class names, "
                          f"got {len(class_names)}")

    nodes = []
    for i in range(t.node_count):
        if t.children_left[i] == -1:
            counts = np.asarray(t.value[i][0])
            nodes.append({"type": "leaf", "class": int(np.argmax(counts))})
        else:
            nodes.append({
                "type": "split",
                "feature": int(t.feature[i]),
                "threshold": float(t.threshold[i]),
                "left": int(t.children_left[i]),
                "right": int(t.children_right[i]),
            })
    return {
        "version": INTERCHANGE_VERSION,
        "feature_names": [str(n) for n in feature_names],
        "class_names": [str(n) for n in class_names],
        "nodes": nodes,
    }


def export_fitted_tree(model, out, feature_names=None, class_names=None) -> Path:
    """Write the interchange document for ``model`` to ``out``."""
    doc = tree_document(model, feature_names, class_names)
    out = Path(out)
    out.write_text(json.dumps(doc, indent=2) + "\n")
    return out


def load_model(path):
    """Unpickle a model file, with a readable error on junk input."""
    try:
        with open(path, "rb") as fh:
            return pickle.load(fh)
    except (pickle.UnpicklingError, EOFError, AttributeError) as exc:
        raise ExportError(f"cannot unpickle {path}: {exc}") from exc
