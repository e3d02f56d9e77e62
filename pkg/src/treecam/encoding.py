"""Translate decision trees into ternary lookup tables.

Pipeline: parse the tree into root-to-leaf paths, reduce each path to one
interval rule per feature, build per-feature unary range codebooks, then
encode every rule over {0, 1, x}. Inference inputs use the same codebooks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .tree import DecisionTree, LEAF

NEG_INF = float("-inf")
POS_INF = float("inf")


class EncodingError(ValueError):
    pass


@dataclass(frozen=True)
class Condition:
    """One tree-edge condition: ``feature <= threshold`` or ``feature > threshold``."""

    feature: int
    relation: str  # "le" or "gt"
    threshold: float


@dataclass
class PathTable:
    """One row per root-to-leaf path, conditions in traversal order."""

    paths: list[list[Condition]]
    classes: list[int]
    n_features: int
    feature_names: tuple[str, ...] = ()
    class_names: tuple[str, ...] = ()

    def __len__(self):
        return len(self.paths)


@dataclass(frozen=True)
class Rule:
    """Interval constraint on one feature.

    comparator '0': value in (-inf, th1]; '1': value in (th1, +inf);
    '2': value in (th1, th2]; 'nan': unconstrained.
    """

    comparator: str
    th1: float = math.nan
    th2: float = math.nan

    def __post_init__(self):
        if self.comparator not in ("0", "1", "2", "nan"):
            raise EncodingError(f"bad comparator {self.comparator!r}")
        if self.comparator == "2" and not self.th1 < self.th2:
            raise EncodingError(f"empty interval ({self.th1}, {self.th2}]")

    def bounds(self) -> tuple[float, float]:
        """Half-open interval (lo, hi] the rule accepts."""
        if self.comparator == "0":
            return NEG_INF, self.th1
        if self.comparator == "1":
            return self.th1, POS_INF
        if self.comparator == "2":
            return self.th1, self.th2
        return NEG_INF, POS_INF

    def satisfied_by(self, value: float) -> bool:
        lo, hi = self.bounds()
        return lo < value <= hi


NO_RULE = Rule("nan")


@dataclass
class ReducedTable:
    """m x N matrix of per-feature rules plus the class of each row."""

    rules: list[list[Rule]]
    classes: list[int]
    n_features: int
    feature_names: tuple[str, ...] = ()
    class_names: tuple[str, ...] = ()

    def __len__(self):
        return len(self.rules)


@dataclass
class FeatureCodebook:
    """Per-feature sorted unique thresholds and the derived unary range codes.

    Feature i with T_i thresholds gets n_i = T_i + 1 exclusive ranges
    (-inf, th_1], (th_1, th_2], ..., (th_Ti, +inf), coded 0..01 through 1..11
    (range k has k trailing ones).
    """

    thresholds: list[np.ndarray]

    @property
    def n_features(self) -> int:
        return len(self.thresholds)

    def n_bits(self, f: int) -> int:
        return len(self.thresholds[f]) + 1

    @property
    def widths(self) -> list[int]:
        return [self.n_bits(f) for f in range(self.n_features)]

    @property
    def total_width(self) -> int:
        return sum(self.widths)

    def range_index(self, f: int, value: float) -> int:
        """1-based exclusive range containing ``value`` (closed on the right)."""
        return int(np.searchsorted(self.thresholds[f], value, side="left")) + 1

    def range_code(self, f: int, k: int) -> str:
        n = self.n_bits(f)
        if not 1 <= k <= n:
            raise EncodingError(f"range index {k} out of 1..{n}")
        return "0" * (n - k) + "1" * k

    def codes(self, f: int) -> list[str]:
        return [self.range_code(f, k) for k in range(1, self.n_bits(f) + 1)]


@dataclass
class TernaryLUT:
    """The compiled lookup table: m rows of {0,1,x} symbols plus classes."""

    rows: list[str]
    classes: list[int]
    codebook: FeatureCodebook
    feature_names: tuple[str, ...] = ()
    class_names: tuple[str, ...] = ()

    @property
    def width(self) -> int:
        return self.codebook.total_width

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_classes(self) -> int:
        if self.class_names:
            return len(self.class_names)
        return max(self.classes) + 1 if self.classes else 1

    @property
    def n_total(self) -> int:
        """Total encoded cell count: rows times summed per-feature widths."""
        return self.n_rows * self.width

    def segments(self, row: int) -> list[str]:
        """Split a row back into its per-feature segments."""
        out, pos = [], 0
        for w in self.codebook.widths:
            out.append(self.rows[row][pos:pos + w])
            pos += w
        return out


def parse_paths(tree: DecisionTree) -> PathTable:
    """Enumerate root-to-leaf paths; left edges emit <=, right edges emit >."""
    paths: list[list[Condition]] = []
    classes: list[int] = []

    def rec(i: int, acc: list[Condition]):
        if tree.is_leaf(i):
            paths.append(list(acc))
            classes.append(int(tree.class_index[i]))
            return
        f, t = int(tree.feature[i]), float(tree.threshold[i])
        rec(tree.left[i], acc + [Condition(f, "le", t)])
        rec(tree.right[i], acc + [Condition(f, "gt", t)])

    rec(0, [])
    return PathTable(
        paths=paths,
        classes=classes,
        n_features=len(tree.feature_names),
        feature_names=tree.feature_names,
        class_names=tree.class_names,
    )


def reduce_columns(table: PathTable) -> ReducedTable:
    """Collapse each path's conditions to a single interval rule per feature."""
    rules: list[list[Rule]] = []
    for j, path in enumerate(table.paths):
        row: list[Rule] = []
        for f in range(table.n_features):
            lo, hi = NEG_INF, POS_INF
            for cond in path:
                if cond.feature != f:
                    continue
                if cond.relation == "le":
                    hi = min(hi, cond.threshold)
                else:
                    lo = max(lo, cond.threshold)
            if lo >= hi:
                raise EncodingError(f"row {j}: empty interval ({lo}, {hi}] on feature {f}")
            if lo == NEG_INF and hi == POS_INF:
                row.append(NO_RULE)
            elif lo == NEG_INF:
                row.append(Rule("0", hi))
            elif hi == POS_INF:
                row.append(Rule("1", lo))
            else:
                row.append(Rule("2", lo, hi))
        rules.append(row)
    return ReducedTable(
        rules=rules,
        classes=list(table.classes),
        n_features=table.n_features,
        feature_names=table.feature_names,
        class_names=table.class_names,
    )


def build_codebook(table: ReducedTable) -> FeatureCodebook:
    """Collect each feature's unique finite thresholds, sorted ascending."""
    thresholds = []
    for f in range(table.n_features):
        vals = set()
        for row in table.rules:
            rule = row[f]
            for t in (rule.th1, rule.th2):
                if math.isfinite(t):
                    vals.add(t)
        thresholds.append(np.array(sorted(vals), dtype=np.float64))
    return FeatureCodebook(thresholds)


def encode_rule(rule: Rule, cb: FeatureCodebook, f: int) -> str:
    """Encode one rule as an n_i-symbol ternary string.

    The spanned exclusive ranges [LB, UB] yield the lower range's code with
    every bit that differs from the upper range's code replaced by 'x',
    i.e. 0^(n-UB) x^(UB-LB) 1^LB.
    """
    n = cb.n_bits(f)
    if rule.comparator == "nan":
        return "x" * n
    lo, hi = rule.bounds()
    ths = cb.thresholds[f]

    def th_pos(t: float) -> int:
        k = int(np.searchsorted(ths, t))
        if k >= len(ths) or ths[k] != t:
            raise EncodingError(f"threshold {t} missing from codebook of feature {f}")
        return k

    lb = 1 if lo == NEG_INF else th_pos(lo) + 2
    ub = n if hi == POS_INF else th_pos(hi) + 1
    if not 1 <= lb <= ub <= n:
        raise EncodingError(f"rule {rule} spans invalid range [{lb}, {ub}] of {n}")
    return "0" * (n - ub) + "x" * (ub - lb) + "1" * lb


def build_lut(table: ReducedTable) -> TernaryLUT:
    """Concatenate per-feature rule encodings, feature order = column order."""
    cb = build_codebook(table)
    rows = [
        "".join(encode_rule(row[f], cb, f) for f in range(table.n_features))
        for row in table.rules
    ]
    return TernaryLUT(
        rows=rows,
        classes=list(table.classes),
        codebook=cb,
        feature_names=table.feature_names,
        class_names=table.class_names,
    )


def compile_tree(tree: DecisionTree) -> TernaryLUT:
    """Full compile pipeline: parse, reduce, encode."""
    return build_lut(reduce_columns(parse_paths(tree)))


def encode_input(x, cb: FeatureCodebook) -> str:
    """Encode a feature vector with the per-feature unary range codes."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (cb.n_features,):
        raise EncodingError(f"input has shape {x.shape}, expected ({cb.n_features},)")
    if np.any(np.isnan(x)):
        raise EncodingError("input contains NaN")
    return "".join(cb.range_code(f, cb.range_index(f, v)) for f, v in enumerate(x))


def encode_batch(rows: np.ndarray, cb: FeatureCodebook) -> np.ndarray:
    """Vectorized :func:`encode_input` for a matrix of inputs -> (n, W) uint8."""
    rows = np.asarray(rows, dtype=np.float64)
    n = len(rows)
    out = np.zeros((n, cb.total_width), dtype=np.uint8)
    pos = 0
    for f in range(cb.n_features):
        w = cb.n_bits(f)
        k = np.searchsorted(cb.thresholds[f], rows[:, f], side="left") + 1
        # range k has k trailing ones within the w-bit segment
        cols = np.arange(w)
        out[:, pos:pos + w] = cols[None, :] >= (w - k)[:, None]
        pos += w
    return out


def ternary_match(row: str, encoded: str) -> bool:
    """Symbolic TCAM row match: 'x' matches anything."""
    if len(row) != len(encoded):
        raise EncodingError("row/input width mismatch")
    return all(r == "x" or r == b for r, b in zip(row, encoded))


def row_satisfied(rules: list[Rule], x) -> bool:
    """Direct interval check, the brute-force oracle for ternary_match."""
    return all(rule.satisfied_by(v) for rule, v in zip(rules, x))


def dump_lut(lut: TernaryLUT) -> str:
    """Textual LUT dump: width header, then one ``symbols | class`` line per row."""
    lines = ["widths " + " ".join(str(w) for w in lut.codebook.widths)]
    for row, cls in zip(lut.rows, lut.classes):
        lines.append(f"{row} | {cls}")
    return "\n".join(lines) + "\n"


def parse_lut(text: str) -> TernaryLUT:
    """Inverse of :func:`dump_lut` (codebook thresholds are not recoverable;
    a placeholder codebook with matching widths is synthesized)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("widths "):
        raise EncodingError("LUT dump missing widths header")
    widths = [int(w) for w in lines[0].split()[1:]]
    rows, classes = [], []
    for ln in lines[1:]:
        sym, _, cls = ln.partition("|")
        rows.append(sym.strip())
        classes.append(int(cls))
        if len(rows[-1]) != sum(widths):
            raise EncodingError("LUT row width mismatch")
    cb = FeatureCodebook([np.arange(1, w, dtype=np.float64) for w in widths])
    return TernaryLUT(rows=rows, classes=classes, codebook=cb)
