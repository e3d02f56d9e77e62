"""Dataset ingestion, min-max normalization, and seeded train/test splitting."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

# Cell values treated as "missing"; a row containing one is dropped.
_MISSING = {"", "na", "n/a", "nan", "?", "null", "none"}


class DatasetError(ValueError):
    """Raised on malformed input files or invalid dataset operations."""


@dataclass(frozen=True)
class Dataset:
    """An in-memory tabular classification dataset.

    ``rows`` is an (n_instances, n_features) float matrix, ``labels`` holds
    class indices into ``class_names``. Instances with missing cells are
    dropped at load time; ``n_dropped`` records how many.
    """

    feature_names: tuple[str, ...]
    rows: np.ndarray
    labels: np.ndarray
    class_names: tuple[str, ...]
    n_dropped: int = 0

    def __post_init__(self):
        if self.rows.ndim != 2:
            raise DatasetError("rows must be a 2-D matrix")
        if len(self.labels) != len(self.rows):
            raise DatasetError("labels/rows length mismatch")
        if len(self.rows) and self.rows.shape[1] != len(self.feature_names):
            raise DatasetError("feature count mismatch")
        if len(self.labels) and (self.labels.min() < 0
                                 or self.labels.max() >= len(self.class_names)):
            raise DatasetError("label references an invalid class index")

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    @property
    def n_classes(self) -> int:
        return len(self.class_names)

    def __len__(self) -> int:
        return len(self.rows)


@dataclass(frozen=True)
class NormParams:
    """Per-feature min/max learned from a training set."""

    feature_min: np.ndarray
    feature_max: np.ndarray

    def __post_init__(self):
        if np.any(self.feature_max < self.feature_min):
            raise DatasetError("max < min in normalization parameters")


def load_csv(path, label_column, header: bool = True) -> Dataset:
    """Load a CSV file into a :class:`Dataset`.

    ``label_column`` selects the class column by header name or integer
    index. Rows with missing cells are dropped (counted in ``n_dropped``);
    any other non-numeric feature cell is an error. Class labels may be
    arbitrary strings and are numbered in order of first appearance.
    """
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            raw = [row for row in csv.reader(fh) if row]
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    if not raw:
        raise DatasetError(f"{path} is empty")

    if header:
        head, raw = raw[0], raw[1:]
    else:
        head = [f"f{i}" for i in range(len(raw[0]))]

    if isinstance(label_column, int) or str(label_column).lstrip("-").isdigit():
        label_idx = int(label_column) % len(head)
    else:
        try:
            label_idx = head.index(str(label_column))
        except ValueError:
            raise DatasetError(f"label column {label_column!r} not in header {head}")

    feature_names = tuple(n for i, n in enumerate(head) if i != label_idx)
    rows, labels, dropped = [], [], 0
    class_names: list[str] = []
    class_ids: dict[str, int] = {}
    for line_no, row in enumerate(raw, start=2 if header else 1):
        if len(row) != len(head):
            raise DatasetError(f"{path}:{line_no}: expected {len(head)} cells, got {len(row)}")
        if any(c.strip().lower() in _MISSING for c in row):
            dropped += 1
            continue
        feats = []
        for i, cell in enumerate(row):
            if i == label_idx:
                continue
            try:
                feats.append(float(cell))
            except ValueError:
                raise DatasetError(f"{path}:{line_no}: non-numeric feature cell {cell!r}")
        lab = row[label_idx].strip()
        if lab not in class_ids:
            class_ids[lab] = len(class_names)
            class_names.append(lab)
        rows.append(feats)
        labels.append(class_ids[lab])

    if not rows:
        raise DatasetError(f"{path}: no complete instances after cleaning")
    if dropped:
        logger.info("%s: %d incomplete instance(s) dropped", path, dropped)
    return Dataset(
        feature_names=feature_names,
        rows=np.asarray(rows, dtype=np.float64),
        labels=np.asarray(labels, dtype=np.int64),
        class_names=tuple(class_names),
        n_dropped=dropped,
    )


def normalize(d: Dataset) -> tuple[Dataset, NormParams]:
    """Min-max scale every feature of ``d`` into [0, 1].

    Parameters are computed on ``d`` itself; constant features map to 0.
    """
    if not len(d):
        raise DatasetError("cannot normalize an empty dataset")
    params = NormParams(d.rows.min(axis=0), d.rows.max(axis=0))
    return apply_norm(d, params), params


def apply_norm(d: Dataset, params: NormParams) -> Dataset:
    """Scale ``d`` with previously computed :class:`NormParams`."""
    span = params.feature_max - params.feature_min
    safe = np.where(span > 0, span, 1.0)
    scaled = (d.rows - params.feature_min) / safe
    scaled[:, span == 0] = 0.0
    return replace(d, rows=scaled)


def split(d: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Deterministically shuffle and partition ``d`` into train/test sets."""
    if not 0.0 < test_fraction < 1.0:
        raise DatasetError("test_fraction must be in (0, 1)")
    n = len(d)
    n_test = int(round(n * test_fraction))
    n_test = min(max(n_test, 1), n - 1)
    perm = np.random.default_rng(seed).permutation(n)
    test_idx, train_idx = perm[:n_test], perm[n_test:]

    def take(idx):
        return replace(d, rows=d.rows[idx], labels=d.labels[idx], n_dropped=0)

    return take(train_idx), take(test_idx)


def iris_path() -> Path:
    """Path of the bundled Iris CSV (150 instances, 4 features, 3 classes)."""
    return Path(__file__).parent / "data" / "iris.csv"


def load_iris() -> Dataset:
    return load_csv(iris_path(), label_column="species")
