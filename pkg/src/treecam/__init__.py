"""treecam: compile decision trees into ternary CAM lookup tables and
simulate inference on tiled resistive TCAM arrays."""

from .dataset import (Dataset, NormParams, load_csv, load_iris, iris_path,
                      normalize, apply_norm, split)
from .tree import (DecisionTree, CartParams, train_cart, predict,
                   export_tree, import_tree)
from .encoding import (PathTable, Rule, ReducedTable, FeatureCodebook,
                       TernaryLUT, parse_paths, reduce_columns, build_codebook,
                       encode_rule, build_lut, compile_tree, encode_input)
from .tiles import TileGeometry, TileSet, plan_tiles, map_lut
from .circuit import (TechnologyParams, DEFAULT_TECH, RowState, row_resistance,
                      dynamic_range_cap, max_row_size, pow2_target, t_opt,
                      ml_voltage, row_energy, latency_and_throughput, area, fom)
from .faults import FaultConfig, inject_saf, sample_sa_offsets, perturb_inputs
from .engine import SimConfig, SimReport, simulate_input, run_inference, sweep

__version__ = "0.1.0"
