"""Partition a ternary LUT into S x S resistive TCAM tiles.

Layout: column 0 of the first column-wise division is the reserved decoder
column ('0' for real rows, '1' for rogue padding rows so the padded '0'
input bit forcibly mismatches them). LUT symbols fill columns 1..W
row-major; leftover physical rows become rogue rows and leftover columns
in the last division become padding whose cells are either masked (both
access transistors off) or plain 'x' depending on ``masked_padding``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .encoding import TernaryLUT

# cell symbol codes
SYM_0 = 0  # stored '0'  -> devices {HRS, LRS}
SYM_1 = 1  # stored '1'  -> devices {LRS, HRS}
SYM_X = 2  # don't care  -> devices {HRS, HRS}
SYM_MASK = 3  # masked don't care: {HRS, HRS} with transistors off
SYM_MM = 4  # always-mismatch {LRS, LRS}; only produced by fault injection

SYMBOL_CHARS = {SYM_0: "0", SYM_1: "1", SYM_X: "x", SYM_MASK: "M", SYM_MM: "!"}
CHAR_SYMBOLS = {v: k for k, v in SYMBOL_CHARS.items()}


class TilingError(ValueError):
    pass


@dataclass(frozen=True)
class TileGeometry:
    """Tile counts for an m x W LUT on S x S arrays (decoder column included)."""

    s: int
    width: int  # encoded LUT width W, decoder column excluded
    m: int  # LUT rows
    n_classes: int

    def __post_init__(self):
        if self.s < 2 or self.width < 1 or self.m < 1 or self.n_classes < 1:
            raise TilingError("geometry values out of range")

    @property
    def n_cwd(self) -> int:
        return math.ceil((self.width + 1) / self.s)

    @property
    def n_rwd(self) -> int:
        return math.ceil(self.m / self.s)

    @property
    def n_tiles(self) -> int:
        return self.n_cwd * self.n_rwd

    @property
    def class_bits(self) -> int:
        return max(1, math.ceil(math.log2(self.n_classes)))

    @property
    def total_rows(self) -> int:
        return self.n_rwd * self.s

    @property
    def total_cols(self) -> int:
        return self.n_cwd * self.s


def plan_tiles(width: int, m: int, n_classes: int, s: int) -> TileGeometry:
    """Tile geometry for an LUT of ``m`` rows by ``width`` symbols."""
    return TileGeometry(s=s, width=width, m=m, n_classes=n_classes)


@dataclass
class TileSet:
    """A LUT mapped onto physical tiles.

    ``symbols`` is the full (n_rwd*S, n_cwd*S) cell matrix; tile (i, j) is
    the slice [i*S:(i+1)*S, j*S:(j+1)*S]. ``class_codes`` holds the stored
    class of every physical row (random valid classes on rogue rows).
    """

    geometry: TileGeometry
    symbols: np.ndarray
    class_codes: np.ndarray
    rogue: np.ndarray  # bool mask over physical rows
    lut: TernaryLUT | None = None
    seed: int = 0

    @property
    def s(self) -> int:
        return self.geometry.s

    def tile(self, i: int, j: int) -> np.ndarray:
        s = self.s
        return self.symbols[i * s:(i + 1) * s, j * s:(j + 1) * s]

    def masked_per_division(self) -> np.ndarray:
        """Masked-cell count per column division (uniform across rows)."""
        masked = self.symbols == SYM_MASK
        per_div = masked.reshape(self.geometry.total_rows, self.geometry.n_cwd,
                                 self.s).sum(axis=2)
        if np.any(per_div != per_div[0]):
            raise TilingError("masked columns are not uniform across rows")
        return per_div[0]


def map_lut(lut: TernaryLUT, s: int, seed: int = 0,
            masked_padding: bool = True) -> TileSet:
    """Map a compiled LUT onto S x S tiles.

    ``masked_padding`` controls the extension columns past the encoded
    width: masked (energy-free, the default) or plain 'x' cells for the
    worst-case energy stance.
    """
    geom = plan_tiles(lut.width, lut.n_rows, lut.n_classes, s)
    rows, cols = geom.total_rows, geom.total_cols

    pad_sym = SYM_MASK if masked_padding else SYM_X
    symbols = np.full((rows, cols), pad_sym, dtype=np.uint8)
    symbols[:, : lut.width + 1] = SYM_X

    # decoder column: real rows match the padded '0' input bit, rogue rows
    # store '1' and can never fully match
    rogue = np.zeros(rows, dtype=bool)
    rogue[lut.n_rows:] = True
    symbols[:, 0] = np.where(rogue, SYM_1, SYM_0)

    for j, row in enumerate(lut.rows):
        symbols[j, 1:1 + lut.width] = [CHAR_SYMBOLS[c] for c in row]

    class_codes = np.zeros(rows, dtype=np.int64)
    class_codes[: lut.n_rows] = lut.classes
    n_rogue = rows - lut.n_rows
    if n_rogue:
        rng = np.random.default_rng(seed)
        class_codes[lut.n_rows:] = rng.integers(0, lut.n_classes, size=n_rogue)

    return TileSet(geometry=geom, symbols=symbols, class_codes=class_codes,
                   rogue=rogue, lut=lut, seed=seed)


def reassemble_lut(ts: TileSet) -> list[str]:
    """Strip decoder column, padding, and rogue rows back to the LUT grid."""
    w, m = ts.geometry.width, ts.geometry.m
    out = []
    for j in range(m):
        cells = ts.symbols[j, 1:1 + w]
        out.append("".join(SYMBOL_CHARS[int(c)] for c in cells))
    return out


def dump_tiles(ts: TileSet) -> str:
    """Bit-exact textual dump used by the golden-file regression tests."""
    g = ts.geometry
    lines = [f"geometry S={g.s} W={g.width} m={g.m} "
             f"n_rwd={g.n_rwd} n_cwd={g.n_cwd} class_bits={g.class_bits}"]
    for i in range(g.n_rwd):
        for j in range(g.n_cwd):
            lines.append(f"tile {i} {j} {g.s}")
            tile = ts.tile(i, j)
            for r in range(g.s):
                lines.append("".join(SYMBOL_CHARS[int(c)] for c in tile[r]))
    lines.append("classes " + " ".join(str(int(c)) for c in ts.class_codes))
    return "\n".join(lines) + "\n"
