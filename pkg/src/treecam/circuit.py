"""Closed-form electrical models for resistive TCAM rows.

A 2T2R cell exposes two parallel branches: the access transistor driven by
the input bit in series with one resistive device, and the complementary
(off) transistor in series with the other device. Matching (and 'x') cells
place the high-resistance device on the driven branch, mismatching cells
the low-resistance one. Masked cells keep both transistors off.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict, replace


class CircuitError(ValueError):
    pass


@dataclass(frozen=True)
class TechnologyParams:
    """16nm-class device constants plus calibrated peripheral scalars.

    Resistances in ohms, capacitance in farads, times in seconds, energies
    in joules, areas in um^2. Peripheral values (tau_pchg, t_sa, e_sa,
    t_mem, e_mem_bit, area scalars) stand in for SPICE-level numbers and
    are overridable through the technology config file.
    """

    r_lrs: float = 5e3
    r_hrs: float = 2.5e6
    r_on: float = 15e3
    r_off: float = 24.25e6
    c_in: float = 50e-15
    v_dd: float = 1.0

    tau_pchg: float = 50e-12
    t_sa: float = 160e-12
    e_sa: float = 5e-15
    t_mem: float = 1e-9
    e_mem_bit: float = 10e-15

    a_2t2r: float = 0.014
    a_sa: float = 0.12
    a_dff: float = 0.06
    a_sp: float = 0.04
    a_1t1r: float = 0.01
    a_sa2: float = 0.5

    def __post_init__(self):
        for name, val in asdict(self).items():
            if val < 0:
                raise CircuitError(f"{name} must be non-negative, got {val}")
        # devices and the sensing path must be strictly positive; energy and
        # area scalars may be zeroed for what-if studies
        for name in ("r_lrs", "r_hrs", "r_on", "r_off", "c_in", "v_dd", "t_mem"):
            if getattr(self, name) <= 0:
                raise CircuitError(f"{name} must be positive")
        if self.r_hrs <= self.r_lrs:
            raise CircuitError("r_hrs must exceed r_lrs")
        if self.r_off <= self.r_on:
            raise CircuitError("r_off must exceed r_on")

    # per-cell conductances (both 2T2R branches in parallel)
    @property
    def g_match(self) -> float:
        """Matching or 'x' cell: driven branch sees HRS, off branch LRS."""
        return 1.0 / (self.r_on + self.r_hrs) + 1.0 / (self.r_off + self.r_lrs)

    @property
    def g_mismatch(self) -> float:
        """Mismatching (or LRS/LRS) cell: driven branch sees LRS."""
        return 1.0 / (self.r_on + self.r_lrs) + 1.0 / (self.r_off + self.r_hrs)

    @property
    def g_masked(self) -> float:
        """Masked cell: both transistors off, only leakage through HRS."""
        return 1.0 / (self.r_off + self.r_hrs)


DEFAULT_TECH = TechnologyParams()


def load_tech_config(path) -> TechnologyParams:
    """Read a JSON technology config; missing fields keep the frozen defaults."""
    with open(path) as fh:
        doc = json.load(fh)
    known = set(asdict(DEFAULT_TECH))
    unknown = set(doc) - known
    if unknown:
        raise CircuitError(f"unknown technology parameters: {sorted(unknown)}")
    return replace(DEFAULT_TECH, **{k: float(v) for k, v in doc.items()})


@dataclass(frozen=True)
class RowState:
    """Electrical classification of one row's cells."""

    n_match: int  # matching or 'x' cells
    n_mismatch: int  # mismatching or LRS/LRS cells
    n_masked: int = 0

    @property
    def size(self) -> int:
        return self.n_match + self.n_mismatch + self.n_masked


def row_resistance(rs: RowState, tp: TechnologyParams = DEFAULT_TECH) -> float:
    """Parallel combination of the per-cell conductances of a row."""
    if rs.n_match + rs.n_mismatch == 0:
        raise CircuitError("row has no unmasked cells")
    g = (rs.n_match * tp.g_match
         + rs.n_mismatch * tp.g_mismatch
         + rs.n_masked * tp.g_masked)
    return 1.0 / g


def dynamic_range_cap(s: int, tp: TechnologyParams = DEFAULT_TECH,
                      n_masked: int = 0) -> float:
    """Full-match vs one-mismatch voltage gap at the optimal sensing time.

    Closed form V_DD * gamma^(gamma/(1-gamma)) * (1-gamma) with
    gamma = R_1mm / R_fm for an ``s``-cell row.
    """
    if s < 1 or (s < 2 and n_masked == 0):
        raise CircuitError("row must have at least 2 cells")
    r_fm = row_resistance(RowState(s, 0, n_masked), tp)
    r_1mm = row_resistance(RowState(s - 1, 1, n_masked), tp)
    gamma = r_1mm / r_fm
    if gamma >= 1.0:
        return 0.0
    return tp.v_dd * gamma ** (gamma / (1.0 - gamma)) * (1.0 - gamma)


def max_row_size(d_limit: float, tp: TechnologyParams = DEFAULT_TECH) -> int:
    """Largest row size whose dynamic range still meets ``d_limit``.

    The gap is strictly decreasing in the row size, so a doubling search
    plus bisection finds the boundary. Never returns below 2.
    """
    if not 0.0 < d_limit < tp.v_dd:
        raise CircuitError("d_limit must lie in (0, v_dd)")
    if dynamic_range_cap(2, tp) < d_limit:
        return 2
    hi = 2
    while dynamic_range_cap(hi * 2, tp) >= d_limit:
        hi *= 2
    lo, hi = hi, hi * 2  # gap(lo) ok, gap(hi) too small
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if dynamic_range_cap(mid, tp) >= d_limit:
            lo = mid
        else:
            hi = mid
    return lo


def pow2_target(max_cells: int) -> int:
    """Power-of-two row size not exceeding the dynamic-range maximum."""
    if max_cells < 2:
        return 2
    return 1 << (max_cells.bit_length() - 1)


def t_opt(r_fm: float, r_1mm: float, tp: TechnologyParams = DEFAULT_TECH) -> float:
    """Sensing time maximizing the full-match/one-mismatch voltage gap."""
    if not r_fm > r_1mm > 0:
        raise CircuitError("requires r_fm > r_1mm > 0")
    return tp.c_in * math.log(r_fm / r_1mm) * (r_fm * r_1mm) / (r_fm - r_1mm)


def t_opt_for_size(s: int, tp: TechnologyParams = DEFAULT_TECH) -> float:
    r_fm = row_resistance(RowState(s, 0), tp)
    r_1mm = row_resistance(RowState(s - 1, 1), tp)
    return t_opt(r_fm, r_1mm, tp)


def ml_voltage(r_row: float, t: float, tp: TechnologyParams = DEFAULT_TECH) -> float:
    """Match-line voltage after discharging the precharged sense capacitor."""
    if t < 0:
        raise CircuitError("time must be non-negative")
    return tp.v_dd * math.exp(-t / (r_row * tp.c_in))


def row_energy(rs: RowState, tp: TechnologyParams = DEFAULT_TECH,
               t_sense: float | None = None) -> float:
    """Energy of one active row per search: capacitor recharge plus its SA.

    The recharge term is C_in * V_DD * (V_DD - V_ml(t_sense)); deeper
    discharge (more mismatches, lower row resistance) costs more energy.
    """
    if t_sense is None:
        t_sense = t_opt_for_size(rs.size, tp)
    v = ml_voltage(row_resistance(rs, tp), t_sense, tp)
    return tp.c_in * tp.v_dd * (tp.v_dd - v) + tp.e_sa


@dataclass(frozen=True)
class Timing:
    t_opt: float
    t_cwd: float
    t_total_avg: float
    f_max: float
    seq_throughput: float
    pipe_throughput: float


# Initiation interval of the pipelined mode, in t_cwd cycles. Calibration
# constant: reproduces the 333e6 dec/s pipelined figure at f_max = 1 GHz.
PIPELINE_STAGES = 3


def latency_and_throughput(geometry, tp: TechnologyParams = DEFAULT_TECH) -> Timing:
    """Per-decision timing for a tiled layout.

    t_cwd = 3*tau_pchg + t_opt + t_sa per column division; the divisions
    run sequentially, then the surviving row's class memory is read.
    """
    topt = t_opt_for_size(geometry.s, tp)
    t_cwd = 3.0 * tp.tau_pchg + topt + tp.t_sa
    t_total = geometry.n_cwd * t_cwd + tp.t_mem
    f_max = 1.0 / max(t_cwd, tp.t_mem)
    return Timing(
        t_opt=topt,
        t_cwd=t_cwd,
        t_total_avg=t_total,
        f_max=f_max,
        seq_throughput=f_max / geometry.n_cwd,
        pipe_throughput=f_max / PIPELINE_STAGES,
    )


def area(geometry, tp: TechnologyParams = DEFAULT_TECH,
         n_classes: int = 2) -> tuple[float, float]:
    """(total mm^2, um^2 per TCAM cell) for a tiled layout.

    Each tile carries S^2 cells plus S sense amplifiers, tag flip-flops and
    selective-precharge gates; the class store adds S * log2(C) 1T1R cells
    with their own amplifiers.
    """
    s, n_t = geometry.s, geometry.n_tiles
    a_um2 = (n_t * (s * s * tp.a_2t2r + s * (tp.a_sa + tp.a_dff + tp.a_sp))
             + s * math.log2(max(n_classes, 2)) * (tp.a_1t1r + tp.a_sa2))
    return a_um2 * 1e-6, a_um2 / (n_t * s * s)


def fom(energy_per_dec: float, delay_per_dec: float, area_mm2: float) -> float:
    """Energy-delay-area product, J*s*mm^2 (lower is better)."""
    if min(energy_per_dec, delay_per_dec, area_mm2) < 0:
        raise CircuitError("fom inputs must be non-negative")
    return energy_per_dec * delay_per_dec * area_mm2
