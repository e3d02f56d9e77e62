"""Functional inference simulation over a tiled TCAM.

Row-wise tiles of one column division search in parallel; column divisions
run sequentially. With selective precharge a row that mismatched in
division k-1 is neither precharged nor sensed in division k. The unique
row matching every division is the survivor; its class store is read out.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import circuit
from .circuit import TechnologyParams, DEFAULT_TECH, RowState
from .dataset import Dataset
from .encoding import encode_batch
from .faults import FaultConfig, inject_saf, sample_sa_offsets, perturb_inputs
from .tiles import TileSet, map_lut, SYM_0, SYM_1, SYM_X, SYM_MASK, SYM_MM
from .tree import DecisionTree, predict_batch

NO_SURVIVOR = -1


class SimulationError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    mode: str = "ideal"  # "ideal" or "analog"
    selective_precharge: bool = True
    pipelined: bool = False
    fault: FaultConfig = field(default_factory=FaultConfig)
    trials: int = 1
    v_ref1: float | None = None  # None -> midpoint policy
    v_ref2: float | None = None

    def __post_init__(self):
        if self.mode not in ("ideal", "analog"):
            raise SimulationError(f"unknown mode {self.mode!r}")
        if self.trials < 1:
            raise SimulationError("trials must be >= 1")


@dataclass
class SimResult:
    """Outcome of one input search."""

    class_index: int
    matched_row: int  # physical row, NO_SURVIVOR on anomaly
    anomaly: str | None  # None, "no_survivor", "multi_survivor"
    active_rows_per_division: np.ndarray
    energy: float


@dataclass
class SimReport:
    accuracy: float
    golden_accuracy: float
    accuracy_loss_pct: float
    energy_per_dec_nj: float
    latency_per_dec_ns: float
    seq_throughput: float
    pipe_throughput: float
    throughput: float
    edp_js: float
    area_mm2: float
    area_per_bit_um2: float
    fom: float
    f_max_hz: float
    n_cwd: int
    n_rwd: int
    s: int
    active_rows_per_division: list[float]
    no_survivor_count: int
    multi_survivor_count: int
    trials: int
    n_inputs: int
    seed: int
    config: dict = field(default_factory=dict)


class SimRuntime:
    """Precomputed per-run state shared by all inputs of one trial."""

    def __init__(self, ts: TileSet, cfg: SimConfig,
                 tp: TechnologyParams = DEFAULT_TECH,
                 offsets: np.ndarray | None = None):
        g = ts.geometry
        self.ts, self.cfg, self.tp, self.geometry = ts, cfg, tp, g
        self.t_opt = circuit.t_opt_for_size(g.s, tp)
        self.masked_per_div = ts.masked_per_division()
        self.offsets = offsets if offsets is not None else np.zeros(
            (g.total_rows, g.n_cwd))

        # per-division reference voltage: midpoint between the full-match
        # and one-mismatch voltages of a row with that division's masked count
        self.v_refs = np.empty(g.n_cwd)
        for k in range(g.n_cwd):
            n_masked = int(self.masked_per_div[k])
            n_live = g.s - n_masked
            if n_live < 1:
                raise SimulationError(f"division {k} has no unmasked cells")
            if k == g.n_cwd - 1 and cfg.v_ref2 is not None:
                self.v_refs[k] = cfg.v_ref2
            elif k < g.n_cwd - 1 and cfg.v_ref1 is not None:
                self.v_refs[k] = cfg.v_ref1
            else:
                v_fm = circuit.ml_voltage(
                    circuit.row_resistance(RowState(n_live, 0, n_masked), tp),
                    self.t_opt, tp)
                if n_live < 2:
                    v_1mm = circuit.ml_voltage(
                        circuit.row_resistance(RowState(0, 1, n_masked), tp),
                        self.t_opt, tp)
                else:
                    v_1mm = circuit.ml_voltage(
                        circuit.row_resistance(RowState(n_live - 1, 1, n_masked), tp),
                        self.t_opt, tp)
                self.v_refs[k] = 0.5 * (v_fm + v_1mm)

        sym = ts.symbols
        self.match_any = (sym == SYM_X) | (sym == SYM_MASK)
        self.match_zero = self.match_any | (sym == SYM_0)
        self.match_one = self.match_any | (sym == SYM_1)
        self.unmasked = sym != SYM_MASK

        # energy lookup per (division, mismatch count): resistance depends
        # only on the counts, so precompute V(T_opt) per possible count
        self.energy_lut = []
        self.voltage_lut = []
        for k in range(g.n_cwd):
            n_masked = int(self.masked_per_div[k])
            n_live = g.s - n_masked
            volts = np.empty(n_live + 1)
            for mm in range(n_live + 1):
                r = circuit.row_resistance(RowState(n_live - mm, mm, n_masked), tp)
                volts[mm] = circuit.ml_voltage(r, self.t_opt, tp)
            self.voltage_lut.append(volts)
            self.energy_lut.append(tp.c_in * tp.v_dd * (tp.v_dd - volts) + tp.e_sa)

    def pad_input(self, encoded: np.ndarray) -> np.ndarray:
        """Prepend the decoder '0' bit and zero-extend to the tiled width."""
        g = self.geometry
        if encoded.shape != (g.width,):
            raise SimulationError(
                f"encoded input has {encoded.shape} bits, expected ({g.width},)")
        bits = np.zeros(g.total_cols, dtype=np.uint8)
        bits[1:1 + g.width] = encoded
        return bits

    def e_mem(self) -> float:
        """Class readout energy: one 1T1R cell per class bit plus its SA."""
        return self.geometry.class_bits * self.tp.e_mem_bit + self.tp.e_sa


def simulate_input(runtime_or_ts, encoded, cfg: SimConfig | None = None,
                   tp: TechnologyParams = DEFAULT_TECH) -> SimResult:
    """Search one encoded input through all column divisions.

    Accepts a prebuilt :class:`SimRuntime` or a raw TileSet (+ cfg). The
    input is the W-bit encoded feature vector; the decoder '0' bit is
    prepended here.
    """
    if isinstance(runtime_or_ts, SimRuntime):
        rt = runtime_or_ts
    else:
        rt = SimRuntime(runtime_or_ts, cfg or SimConfig(), tp)
    g, cfg = rt.geometry, rt.cfg

    if isinstance(encoded, str):
        encoded = np.frombuffer(encoded.encode(), dtype=np.uint8) - ord("0")
    encoded = np.asarray(encoded, dtype=np.uint8)
    bits = rt.pad_input(encoded)

    cell_match = np.where(bits[None, :] == 1, rt.match_one, rt.match_zero)
    shape3 = (g.total_rows, g.n_cwd, g.s)
    if cfg.mode == "analog":
        mm_counts = (~cell_match & rt.unmasked).reshape(shape3).sum(axis=2)
        ml_volts = np.empty_like(rt.offsets)
        for k in range(g.n_cwd):
            ml_volts[:, k] = rt.voltage_lut[k][mm_counts[:, k]]
        div_match = ml_volts > (rt.v_refs[None, :] + rt.offsets)
    else:
        div_match = cell_match.reshape(shape3).all(axis=2)
        mm_counts = (~cell_match & rt.unmasked).reshape(shape3).sum(axis=2)

    energy = 0.0
    active_counts = np.empty(g.n_cwd, dtype=np.int64)
    enabled = np.ones(g.total_rows, dtype=bool)
    survivors = np.ones(g.total_rows, dtype=bool)
    for k in range(g.n_cwd):
        active = enabled if cfg.selective_precharge else np.ones_like(enabled)
        active_counts[k] = int(active.sum())
        energy += float(rt.energy_lut[k][mm_counts[active, k]].sum())
        survivors = survivors & div_match[:, k] & (
            enabled if cfg.selective_precharge else True)
        if cfg.selective_precharge:
            enabled = enabled & div_match[:, k]

    winners = np.nonzero(survivors)[0]
    if len(winners) == 0:
        return SimResult(NO_SURVIVOR, NO_SURVIVOR, "no_survivor",
                         active_counts, energy)
    row = int(winners[0])
    anomaly = "multi_survivor" if len(winners) > 1 else None
    energy += rt.e_mem()
    return SimResult(int(rt.ts.class_codes[row]), row, anomaly,
                     active_counts, energy)


def _trial_seeds(base: int, trial: int) -> tuple[int, int, int]:
    ss = np.random.SeedSequence([base, trial])
    a, b, c = ss.generate_state(3)
    return int(a), int(b), int(c)


def run_encoded(ts: TileSet, encoded_inputs: np.ndarray, cfg: SimConfig,
                tp: TechnologyParams = DEFAULT_TECH,
                labels: np.ndarray | None = None,
                golden_pred: np.ndarray | None = None,
                config_echo: dict | None = None) -> SimReport:
    """Simulate a batch of already-encoded inputs (single trial, no input noise)."""
    return _run(ts, encoded_inputs, cfg, tp, labels=labels,
                golden_pred=golden_pred, test=None, config_echo=config_echo)


def run_inference(ts: TileSet, test: Dataset, cfg: SimConfig,
                  tp: TechnologyParams = DEFAULT_TECH,
                  tree: DecisionTree | None = None,
                  config_echo: dict | None = None) -> SimReport:
    """Full evaluation of a (normalized) test set, averaged over trials.

    Fault injection, SA offsets, and input noise are redrawn per trial from
    seeds derived from the fault config's master seed. Golden predictions
    (direct tree traversal on the clean inputs) anchor the accuracy loss.
    """
    if ts.lut is None:
        raise SimulationError("TileSet carries no LUT codebook; use run_encoded")
    if not len(test):
        raise SimulationError("empty test set")
    golden_pred = predict_batch(tree, test.rows) if tree is not None else None
    return _run(ts, None, cfg, tp, labels=test.labels,
                golden_pred=golden_pred, test=test, config_echo=config_echo)


def _run(ts, encoded_inputs, cfg, tp, labels, golden_pred, test,
         config_echo) -> SimReport:
    g = ts.geometry
    fc = cfg.fault

    acc_sum = 0.0
    energy_sum = 0.0
    active_sum = np.zeros(g.n_cwd)
    n_none = n_multi = 0
    n_inputs = len(test) if test is not None else len(encoded_inputs)

    for trial in range(cfg.trials):
        saf_seed, sa_seed, in_seed = _trial_seeds(fc.seed, trial)
        trial_ts = inject_saf(ts, replace(fc, seed=saf_seed))
        offsets = sample_sa_offsets(g, fc.sigma_sa, sa_seed)
        if test is not None:
            noisy = perturb_inputs(test, fc.sigma_in, in_seed)
            enc = encode_batch(noisy.rows, ts.lut.codebook)
        else:
            enc = encoded_inputs
        rt = SimRuntime(trial_ts, cfg, tp, offsets)

        correct = 0
        for i, e in enumerate(enc):
            res = simulate_input(rt, e)
            energy_sum += res.energy
            active_sum += res.active_rows_per_division
            if res.anomaly == "no_survivor":
                n_none += 1
            elif res.anomaly == "multi_survivor":
                n_multi += 1
            if labels is not None and res.class_index == labels[i]:
                correct += 1
        if labels is not None:
            acc_sum += correct / n_inputs

    n_runs = cfg.trials * n_inputs
    accuracy = acc_sum / cfg.trials if labels is not None else math.nan
    if golden_pred is not None and labels is not None:
        golden_acc = float(np.mean(golden_pred == labels))
    else:
        golden_acc = math.nan
    if golden_acc and not math.isnan(golden_acc):
        loss = 100.0 * (golden_acc - accuracy) / golden_acc
    else:
        loss = math.nan

    timing = circuit.latency_and_throughput(g, tp)
    area_mm2, per_bit = circuit.area(g, tp, g.n_classes)
    mean_energy = energy_sum / n_runs
    edp = mean_energy * timing.t_total_avg
    throughput = timing.pipe_throughput if cfg.pipelined else timing.seq_throughput

    return SimReport(
        accuracy=accuracy,
        golden_accuracy=golden_acc,
        accuracy_loss_pct=loss,
        energy_per_dec_nj=mean_energy * 1e9,
        latency_per_dec_ns=timing.t_total_avg * 1e9,
        seq_throughput=timing.seq_throughput,
        pipe_throughput=timing.pipe_throughput,
        throughput=throughput,
        edp_js=edp,
        area_mm2=area_mm2,
        area_per_bit_um2=per_bit,
        fom=circuit.fom(mean_energy, timing.t_total_avg, area_mm2),
        f_max_hz=timing.f_max,
        n_cwd=g.n_cwd,
        n_rwd=g.n_rwd,
        s=g.s,
        active_rows_per_division=list(active_sum / n_runs),
        no_survivor_count=n_none,
        multi_survivor_count=n_multi,
        trials=cfg.trials,
        n_inputs=n_inputs,
        seed=fc.seed,
        config=config_echo or {},
    )


def sweep(lut, test: Dataset, cfg: SimConfig,
          s_grid=(128,), p_sa0_grid=(0.0,), p_sa1_grid=(0.0,),
          sigma_sa_grid=(0.0,), sigma_in_grid=(0.0,),
          tp: TechnologyParams = DEFAULT_TECH,
          tree: DecisionTree | None = None,
          master_seed: int = 0, map_seed: int = 0,
          masked_padding: bool = True) -> list[SimReport]:
    """Cartesian sweep over tile size and non-ideality grids.

    Every configuration is averaged over ``cfg.trials`` trials; per-config
    seeds derive deterministically from ``master_seed``.
    """
    grids = [s_grid, p_sa0_grid, p_sa1_grid, sigma_sa_grid, sigma_in_grid]
    if any(len(grid) == 0 for grid in grids):
        raise SimulationError("sweep grids must be non-empty")
    reports = []
    tilesets = {s: map_lut(lut, s, seed=map_seed, masked_padding=masked_padding)
                for s in s_grid}
    for idx, (s, p0, p1, ssa, sin) in enumerate(itertools.product(*grids)):
        fc = FaultConfig(p_sa0=p0, p_sa1=p1, sigma_sa=ssa, sigma_in=sin,
                         seed=int(np.random.SeedSequence([master_seed, idx])
                                  .generate_state(1)[0]))
        run_cfg = replace(cfg, fault=fc)
        echo = {"s": s, "p_sa0": p0, "p_sa1": p1,
                "sigma_sa": ssa, "sigma_in": sin}
        reports.append(run_inference(tilesets[s], test, run_cfg, tp,
                                     tree=tree, config_echo=echo))
    return reports
