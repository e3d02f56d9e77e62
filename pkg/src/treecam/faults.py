"""Hardware non-ideality injectors: stuck-at faults in the resistive
devices, sense-amplifier reference-voltage offsets, and input noise."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dataset import Dataset
from .tiles import TileSet, TileGeometry, SYM_0, SYM_1, SYM_X, SYM_MASK, SYM_MM


class FaultError(ValueError):
    pass


@dataclass(frozen=True)
class FaultConfig:
    """Per-device stuck-at rates, SA offset sigma (volts), input noise sigma."""

    p_sa0: float = 0.0
    p_sa1: float = 0.0
    sigma_sa: float = 0.0
    sigma_in: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not (0.0 <= self.p_sa0 <= 1.0 and 0.0 <= self.p_sa1 <= 1.0):
            raise FaultError("stuck-at probabilities must lie in [0, 1]")
        if self.p_sa0 + self.p_sa1 > 1.0:
            raise FaultError("p_sa0 + p_sa1 must not exceed 1")
        if self.sigma_sa < 0 or self.sigma_in < 0:
            raise FaultError("sigmas must be non-negative")

    @property
    def ideal(self) -> bool:
        return (self.p_sa0 == 0 and self.p_sa1 == 0
                and self.sigma_sa == 0 and self.sigma_in == 0)


# symbol -> (device1, device2); device value 0 = HRS, 1 = LRS.
# Input bit 0 drives device1's transistor, input bit 1 drives device2's;
# a cell matches when the driven device is in HRS.
_SYM_TO_DEV = np.zeros((5, 2), dtype=np.uint8)
_SYM_TO_DEV[SYM_0] = (0, 1)
_SYM_TO_DEV[SYM_1] = (1, 0)
_SYM_TO_DEV[SYM_X] = (0, 0)
_SYM_TO_DEV[SYM_MASK] = (0, 0)
_SYM_TO_DEV[SYM_MM] = (1, 1)

# (device1, device2) -> symbol
_DEV_TO_SYM = np.array([[SYM_X, SYM_0],
                        [SYM_1, SYM_MM]], dtype=np.uint8)


def inject_saf(ts: TileSet, fc: FaultConfig) -> TileSet:
    """Return a new TileSet with stuck-at faults applied per device.

    Each resistive device independently sticks at HRS with ``p_sa0`` or at
    LRS with ``p_sa1``. Masked cells are immune (their transistors are off,
    so a stuck device never reaches the match line).
    """
    if fc.p_sa0 == 0 and fc.p_sa1 == 0:
        return ts
    rng = np.random.default_rng(fc.seed)
    sym = ts.symbols
    dev = _SYM_TO_DEV[sym]  # (rows, cols, 2)
    u = rng.random(dev.shape)
    dev = np.where(u < fc.p_sa0, 0, dev)
    dev = np.where((u >= fc.p_sa0) & (u < fc.p_sa0 + fc.p_sa1), 1, dev)
    out = _DEV_TO_SYM[dev[..., 0], dev[..., 1]]
    out[sym == SYM_MASK] = SYM_MASK
    return replace(ts, symbols=out)


def sample_sa_offsets(geometry: TileGeometry, sigma_sa: float, seed: int) -> np.ndarray:
    """Gaussian reference-voltage offsets, one per physical sense amplifier.

    Shape (total_rows, n_cwd): every row of every column division owns one
    SA. Offsets model static manufacturing variability, so they are drawn
    once per simulation run.
    """
    if sigma_sa < 0:
        raise FaultError("sigma_sa must be non-negative")
    shape = (geometry.total_rows, geometry.n_cwd)
    if sigma_sa == 0:
        return np.zeros(shape)
    rng = np.random.default_rng(seed)
    return rng.normal(0.0, sigma_sa, size=shape)


def perturb_inputs(test: Dataset, sigma_in: float, seed: int) -> Dataset:
    """Add i.i.d. Gaussian noise to every (normalized) feature value.

    Values are not clamped; the open-ended outer codebook ranges absorb
    excursions past [0, 1].
    """
    if sigma_in < 0:
        raise FaultError("sigma_in must be non-negative")
    if sigma_in == 0:
        return test
    rng = np.random.default_rng(seed)
    noisy = test.rows + rng.normal(0.0, sigma_in, size=test.rows.shape)
    return replace(test, rows=noisy)
