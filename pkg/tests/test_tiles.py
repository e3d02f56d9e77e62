import numpy as np
import pytest

import treecam as tc
from treecam.tiles import (SYM_0, SYM_1, SYM_MASK, SYM_X, TilingError,
                           dump_tiles, map_lut, plan_tiles, reassemble_lut)
from helpers import synthetic_lut

# (dataset, (m, W)) -> expected n_rwd x n_cwd per S, straight from the
# published tiling table
TILING_TABLE = {
    "iris": ((9, 12), {16: (1, 1), 32: (1, 1), 64: (1, 1), 128: (1, 1)}),
    "diabetes": ((120, 123), {16: (8, 8), 32: (4, 4), 64: (2, 2), 128: (1, 1)}),
    "haberman": ((93, 71), {16: (6, 5), 32: (3, 3), 64: (2, 2), 128: (1, 1)}),
    "car": ((76, 20), {16: (5, 2), 32: (3, 1), 64: (2, 1), 128: (1, 1)}),
    "cancer": ((23, 52), {16: (2, 4), 32: (1, 2), 64: (1, 1), 128: (1, 1)}),
    "credit": ((8475, 3580), {16: (530, 224), 32: (265, 112),
                              64: (133, 56), 128: (67, 28)}),
    "titanic": ((191, 150), {16: (12, 10), 32: (6, 5), 64: (3, 3), 128: (2, 2)}),
    "covid": ((441, 146), {16: (28, 10), 32: (14, 5), 64: (7, 3), 128: (4, 2)}),
}


class TestPlanTiles:
    @pytest.mark.parametrize("name", sorted(TILING_TABLE))
    def test_published_table(self, name):
        (m, w), per_s = TILING_TABLE[name]
        for s, (rwd, cwd) in per_s.items():
            g = plan_tiles(w, m, 2, s)
            assert (g.n_rwd, g.n_cwd) == (rwd, cwd), f"{name} S={s}"

    def test_exact_fit_single_tile(self):
        g = plan_tiles(15, 16, 2, 16)
        assert g.n_rwd == 1 and g.n_cwd == 1

    def test_class_bits(self):
        assert plan_tiles(10, 10, 3, 16).class_bits == 2
        assert plan_tiles(10, 10, 2, 16).class_bits == 1
        assert plan_tiles(10, 10, 5, 16).class_bits == 3

    def test_invalid_geometry(self):
        with pytest.raises(TilingError):
            plan_tiles(0, 5, 2, 16)
        with pytest.raises(TilingError):
            plan_tiles(5, 5, 2, 1)


class TestMapLut:
    def test_iris_shape(self, iris_lut):
        ts = map_lut(iris_lut, 16)
        g = ts.geometry
        assert (g.n_rwd, g.n_cwd) == (1, 1)
        assert int(ts.rogue.sum()) == 16 - iris_lut.n_rows == 7
        assert g.class_bits == 2
        # decoder column: '0' on real rows, '1' on rogue rows
        np.testing.assert_array_equal(
            ts.symbols[:iris_lut.n_rows, 0], SYM_0)
        np.testing.assert_array_equal(ts.symbols[iris_lut.n_rows:, 0], SYM_1)

    def test_exact_fit_no_padding(self):
        lut = synthetic_lut(16, 15, seed=0)
        ts = map_lut(lut, 16)
        assert int(ts.rogue.sum()) == 0
        assert not np.any(ts.symbols == SYM_MASK)

    def test_rogue_rows_all_x_payload(self, iris_lut):
        ts = map_lut(iris_lut, 16)
        payload = ts.symbols[iris_lut.n_rows:, 1:1 + iris_lut.width]
        assert np.all(payload == SYM_X)

    def test_rogue_classes_valid_and_seeded(self, iris_lut):
        a = map_lut(iris_lut, 16, seed=5)
        b = map_lut(iris_lut, 16, seed=5)
        c = map_lut(iris_lut, 64, seed=6)
        np.testing.assert_array_equal(a.class_codes, b.class_codes)
        assert a.class_codes.min() >= 0
        assert a.class_codes.max() < iris_lut.n_classes
        assert c.class_codes.max() < iris_lut.n_classes

    def test_reassembly_bit_exact(self, iris_lut):
        for s in (16, 32):
            ts = map_lut(iris_lut, s)
            assert reassemble_lut(ts) == iris_lut.rows

    def test_reassembly_multi_division(self):
        lut = synthetic_lut(40, 70, seed=3)
        ts = map_lut(lut, 16)
        assert ts.geometry.n_rwd == 3 and ts.geometry.n_cwd == 5
        assert reassemble_lut(ts) == lut.rows

    def test_masked_padding_toggle(self):
        lut = synthetic_lut(10, 20, seed=1)
        masked = map_lut(lut, 16, masked_padding=True)
        worst = map_lut(lut, 16, masked_padding=False)
        ext = np.s_[:, 21:]
        assert np.all(masked.symbols[ext] == SYM_MASK)
        assert np.all(worst.symbols[ext] == SYM_X)
        assert masked.masked_per_division().tolist() == [0, 11]
        assert worst.masked_per_division().tolist() == [0, 0]

    def test_rogue_rows_never_match_padded_input(self, iris_lut):
        """Decoder bit '1' against the padded '0' input mismatches rogue rows."""
        ts = map_lut(iris_lut, 16)
        from treecam.engine import SimConfig, SimRuntime, simulate_input
        rt = SimRuntime(ts, SimConfig())
        rng = np.random.default_rng(0)
        for _ in range(20):
            enc = rng.integers(0, 2, iris_lut.width).astype(np.uint8)
            res = simulate_input(rt, enc)
            assert res.matched_row < iris_lut.n_rows or res.matched_row == -1


def test_dump_tiles_golden_shape(iris_lut):
    ts = map_lut(iris_lut, 16)
    text = dump_tiles(ts)
    lines = text.splitlines()
    assert lines[0].startswith("geometry S=16")
    assert lines[1] == "tile 0 0 16"
    assert len(lines) == 1 + 1 + 16 + 1  # header + tile header + rows + classes
    assert lines[-1].startswith("classes ")
    # symbol rows restricted to the dump alphabet
    assert set("".join(lines[2:18])) <= set("01xM!")
