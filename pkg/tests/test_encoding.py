import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import treecam as tc
from treecam.encoding import (Condition, EncodingError, FeatureCodebook,
                              PathTable, ReducedTable, Rule, build_codebook,
                              build_lut, dump_lut, encode_batch, encode_input,
                              encode_rule, parse_lut, parse_paths,
                              reduce_columns, row_satisfied, ternary_match)
from helpers import random_tree, random_dataset_for

FIG_THRESHOLDS = [0.8, 1.5, 1.65, 1.75]


@pytest.fixture
def fig_codebook():
    return FeatureCodebook([np.array(FIG_THRESHOLDS)])


def two_path_pw_table():
    """The worked mini example: [PW<=0.8]->Setosa, [PW>0.8, PW>1.75]->Virginica."""
    return PathTable(
        paths=[[Condition(0, "le", 0.8)],
               [Condition(0, "gt", 0.8), Condition(0, "gt", 1.75)]],
        classes=[0, 1],
        n_features=1,
        feature_names=("petal_width",),
        class_names=("Setosa", "Virginica"),
    )


class TestParsePaths:
    def test_mini_tree_rows(self):
        from test_tree import mini_pw_tree
        table = parse_paths(mini_pw_tree())
        assert len(table) == 3
        assert table.paths[0] == [Condition(0, "le", 0.8)]
        assert table.paths[2] == [Condition(0, "gt", 0.8), Condition(0, "gt", 1.75)]
        assert table.classes == [0, 1, 2]

    def test_single_leaf(self):
        t = tc.DecisionTree(np.array([-1]), np.array([0.0]), np.array([-1]),
                            np.array([-1]), np.array([0]), ("f",), ("a",))
        table = parse_paths(t)
        assert len(table) == 1 and table.paths[0] == []

    def test_complete_depth2(self):
        t = random_tree(4, 2, seed=0)
        # force a complete shape instead: any 4-leaf tree has 4 paths
        table = parse_paths(t)
        assert len(table) == 4


class TestReduceColumns:
    def test_two_gt_conditions_reduce(self):
        table = reduce_columns(two_path_pw_table())
        assert table.rules[1][0] == Rule("1", 1.75)

    def test_interval_intersection(self):
        p = PathTable([[Condition(0, "le", 3.0), Condition(0, "gt", 1.0)]],
                      [0], 1)
        assert reduce_columns(p).rules[0][0] == Rule("2", 1.0, 3.0)

    def test_empty_interval_rejected(self):
        p = PathTable([[Condition(0, "le", 3.0), Condition(0, "le", 2.0),
                        Condition(0, "gt", 2.5)]], [0], 1)
        with pytest.raises(EncodingError, match="empty interval"):
            reduce_columns(p)

    def test_unconstrained_feature_nan(self):
        p = PathTable([[Condition(0, "le", 1.0)]], [0], 2)
        table = reduce_columns(p)
        assert table.rules[0][1].comparator == "nan"


class TestCodebook:
    def test_fig_codes(self, fig_codebook):
        assert fig_codebook.codes(0) == ["00001", "00011", "00111", "01111", "11111"]

    def test_pw_three_codes(self):
        cb = FeatureCodebook([np.array([0.8, 1.75])])
        assert cb.codes(0) == ["001", "011", "111"]

    def test_zero_thresholds(self):
        table = ReducedTable([[Rule("nan")]], [0], 1)
        cb = build_codebook(table)
        assert cb.n_bits(0) == 1 and cb.codes(0) == ["1"]

    def test_built_from_rules(self):
        table = ReducedTable(
            [[Rule("0", 0.8)], [Rule("2", 1.5, 1.65)], [Rule("1", 1.75)]],
            [0, 1, 2], 1)
        cb = build_codebook(table)
        np.testing.assert_array_equal(cb.thresholds[0], FIG_THRESHOLDS)


class TestEncodeRule:
    def test_first_range(self, fig_codebook):
        assert encode_rule(Rule("0", 0.8), fig_codebook, 0) == "00001"

    def test_union_range(self, fig_codebook):
        assert encode_rule(Rule("2", 0.8, 1.65), fig_codebook, 0) == "00x11"

    def test_open_upper(self, fig_codebook):
        assert encode_rule(Rule("1", 1.5), fig_codebook, 0) == "xx111"

    def test_single_exclusive_range(self, fig_codebook):
        assert encode_rule(Rule("2", 1.65, 1.75), fig_codebook, 0) == "01111"

    def test_nan_rule_all_x(self, fig_codebook):
        assert encode_rule(Rule("nan"), fig_codebook, 0) == "xxxxx"

    def test_threshold_missing_from_codebook(self, fig_codebook):
        with pytest.raises(EncodingError, match="missing"):
            encode_rule(Rule("0", 0.9), fig_codebook, 0)


class TestBuildLut:
    def test_mini_example_segments(self):
        lut = build_lut(reduce_columns(two_path_pw_table()))
        assert lut.rows == ["001", "111"]
        assert lut.classes == [0, 1]
        assert lut.n_total == 6

    def test_trivial_single_cell(self):
        lut = build_lut(ReducedTable([[Rule("nan")]], [0], 1))
        assert lut.rows == ["x"] and lut.n_total == 1

    def test_always_match_rule_single_one(self):
        # a feature with no thresholds anywhere still owns one input bit
        table = ReducedTable([[Rule("0", 1.0), Rule("nan")]], [0], 2)
        lut = build_lut(table)
        assert lut.codebook.widths == [2, 1]

    def test_lut_dump_round_trip(self, iris_lut):
        text = dump_lut(iris_lut)
        back = parse_lut(text)
        assert back.rows == iris_lut.rows
        assert back.classes == iris_lut.classes
        assert back.codebook.widths == iris_lut.codebook.widths


class TestEncodeInput:
    def test_first_range(self, fig_codebook):
        assert encode_input([0.5], fig_codebook) == "00001"

    def test_fourth_range(self, fig_codebook):
        assert encode_input([1.7], fig_codebook) == "01111"

    def test_boundary_closed_right(self, fig_codebook):
        assert encode_input([0.8], fig_codebook) == "00001"
        assert encode_input([0.8 + 1e-12], fig_codebook) == "00011"

    def test_nan_rejected(self, fig_codebook):
        with pytest.raises(EncodingError, match="NaN"):
            encode_input([math.nan], fig_codebook)

    def test_batch_matches_scalar(self, iris_lut):
        rng = np.random.default_rng(0)
        X = rng.random((40, 4))
        enc = encode_batch(X, iris_lut.codebook)
        for x, bits in zip(X, enc):
            assert "".join(map(str, bits)) == encode_input(x, iris_lut.codebook)


class TestMatchingEquivalence:
    """Core theorem: a LUT row matches an encoded input iff the input
    satisfies every interval rule of that row. Verified by a brute-force
    sweep straddling all thresholds."""

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_grid_sweep(self, seed):
        tree = random_tree(25, 3, seed)
        table = reduce_columns(parse_paths(tree))
        lut = build_lut(table)
        cb = lut.codebook
        probes = []
        for f in range(cb.n_features):
            ths = list(cb.thresholds[f])
            pts = [t for t in ths] + [t + 1e-9 for t in ths] + [-0.5, 0.33, 1.5]
            probes.append(pts[:6])
        import itertools
        for x in itertools.product(*probes):
            enc = encode_input(x, cb)
            for j in range(lut.n_rows):
                assert ternary_match(lut.rows[j], enc) == \
                    row_satisfied(table.rules[j], x)

    @pytest.mark.parametrize("seed", [3, 4])
    def test_exactly_one_match(self, seed):
        tree = random_tree(40, 4, seed)
        lut = tc.compile_tree(tree)
        ds = random_dataset_for(tree, 120, seed)
        for x, label in zip(ds.rows, ds.labels):
            enc = encode_input(x, lut.codebook)
            hits = [j for j in range(lut.n_rows)
                    if ternary_match(lut.rows[j], enc)]
            assert len(hits) == 1
            assert lut.classes[hits[0]] == label


@st.composite
def reduced_tables(draw):
    n_features = draw(st.integers(1, 4))
    m = draw(st.integers(1, 6))
    rows = []
    for _ in range(m):
        row = []
        for _ in range(n_features):
            comp = draw(st.sampled_from(["0", "1", "2", "nan"]))
            a = draw(st.integers(0, 8))
            b = a + draw(st.integers(1, 4))
            if comp == "nan":
                row.append(Rule("nan"))
            elif comp == "2":
                row.append(Rule("2", float(a), float(b)))
            else:
                row.append(Rule(comp, float(a)))
        rows.append(row)
    return ReducedTable(rows, list(range(m)), n_features)


@given(reduced_tables())
@settings(max_examples=60, deadline=None)
def test_bit_count_invariant(table):
    """n_total equals rows times the sum of per-feature widths T_i + 1."""
    lut = build_lut(table)
    widths = []
    for f in range(table.n_features):
        uniq = {t for row in table.rules
                for t in (row[f].th1, row[f].th2) if math.isfinite(t)}
        widths.append(len(uniq) + 1)
    assert lut.codebook.widths == widths
    assert lut.n_total == len(table.rules) * sum(widths)
    assert all(len(r) == sum(widths) for r in lut.rows)


@given(reduced_tables())
@settings(max_examples=60, deadline=None)
def test_code_shape_invariant(table):
    """Every encoded segment matches 0* x* 1*, non-'nan' rules keep >=1 digit."""
    import re
    lut = build_lut(table)
    for j in range(lut.n_rows):
        for f, seg in enumerate(lut.segments(j)):
            assert re.fullmatch(r"0*x*1*", seg)
            if table.rules[j][f].comparator != "nan":
                assert seg.count("0") + seg.count("1") >= 1
