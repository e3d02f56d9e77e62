"""Command-line front end: train, compile, map, simulate, sweep, report."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import circuit, encoding, engine, tiles
from .circuit import DEFAULT_TECH, load_tech_config
from .dataset import load_csv, normalize, apply_norm, split
from .engine import SimConfig, SimReport
from .faults import FaultConfig
from .tree import CartParams, train_cart, predict_batch, export_tree, import_tree

REPORT_FIELDS = [f.name for f in dataclasses.fields(SimReport) if f.name != "config"]
SWEEP_FIELDS = ["s", "p_sa0", "p_sa1", "sigma_sa", "sigma_in"] + REPORT_FIELDS


def config_hash(cfg: dict) -> str:
    return hashlib.sha256(
        json.dumps(cfg, sort_keys=True, default=str).encode()).hexdigest()[:16]


def _write_json(path: Path, payload: dict, cfg: dict):
    payload = dict(payload)
    payload["config"] = cfg
    payload["config_hash"] = config_hash(cfg)
    path.write_text(json.dumps(payload, indent=2, default=str) + "\n")


def _tech(args) -> circuit.TechnologyParams:
    return load_tech_config(args.tech) if args.tech else DEFAULT_TECH


def _resolve_size(args, tp) -> int:
    if (args.size is None) == (args.dlimit is None):
        raise SystemExit("specify exactly one of --size / --dlimit")
    if args.size is not None:
        return args.size
    max_cells = circuit.max_row_size(args.dlimit, tp)
    return circuit.pow2_target(max_cells)


def _load_split_train(args):
    """Shared train/compile plumbing: dataset -> normalized splits (+ tree)."""
    ds = load_csv(args.data, args.label_column, header=not args.no_header)
    train, test = split(ds, args.test_frac, args.seed)
    train_n, params = normalize(train)
    test_n = apply_norm(test, params)
    cart = CartParams(max_depth=args.max_depth,
                      min_samples_leaf=args.min_samples_leaf,
                      min_samples_split=args.min_samples_split)
    tree = train_cart(train_n, cart)
    return ds, train_n, test_n, tree


def _add_train_opts(p):
    p.add_argument("--data", required=True, help="dataset CSV path")
    p.add_argument("--label-column", default=-1,
                   help="class column name or index (default: last)")
    p.add_argument("--no-header", action="store_true")
    p.add_argument("--test-frac", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--min-samples-leaf", type=int, default=1)
    p.add_argument("--min-samples-split", type=int, default=2)


def _add_geometry_opts(p):
    p.add_argument("--size", type=int, default=None, help="tile dimension S")
    p.add_argument("--dlimit", type=float, default=None,
                   help="dynamic-range limit resolving S via the power-of-two policy")
    p.add_argument("--tech", default=None, help="technology config JSON")


def cmd_train(args) -> int:
    _, _, test_n, tree = _load_split_train(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    doc = export_tree(tree)
    (out / "tree.json").write_text(doc)
    golden = float(np.mean(predict_batch(tree, test_n.rows) == test_n.labels))
    cfg = {k: getattr(args, k) for k in
           ("data", "label_column", "test_frac", "seed", "max_depth",
            "min_samples_leaf", "min_samples_split")}
    _write_json(out / "train_summary.json",
                {"golden_accuracy": golden, "n_leaves": tree.n_leaves(),
                 "depth": tree.depth()}, cfg)
    print(f"tree written to {out / 'tree.json'}")
    print(f"golden accuracy: {golden:.4f}")
    return 0


def cmd_compile(args) -> int:
    tree = import_tree(Path(args.tree).read_text())
    lut = encoding.compile_tree(tree)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "lut.txt").write_text(encoding.dump_lut(lut))
    cb = {
        "feature_names": list(lut.feature_names),
        "thresholds": [list(map(float, t)) for t in lut.codebook.thresholds],
        "codes": [lut.codebook.codes(f) for f in range(lut.codebook.n_features)],
    }
    _write_json(out / "codebook.json", cb, {"tree": args.tree})
    print(f"LUT {lut.n_rows}x{lut.width} written to {out / 'lut.txt'}")
    return 0


def cmd_map(args) -> int:
    tp = _tech(args)
    s = _resolve_size(args, tp)
    lut = encoding.parse_lut(Path(args.lut).read_text())
    ts = tiles.map_lut(lut, s, seed=args.seed,
                       masked_padding=not args.unmasked_padding)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "tiles.txt").write_text(tiles.dump_tiles(ts))
    g = ts.geometry
    cfg = {"lut": args.lut, "size": s, "seed": args.seed,
           "masked_padding": not args.unmasked_padding}
    _write_json(out / "geometry.json",
                {"s": g.s, "n_rwd": g.n_rwd, "n_cwd": g.n_cwd,
                 "n_tiles": g.n_tiles, "class_bits": g.class_bits,
                 "rogue_rows": int(ts.rogue.sum())}, cfg)
    print(f"{g.n_rwd}x{g.n_cwd} tiles (S={g.s}), "
          f"{int(ts.rogue.sum())} rogue rows -> {out / 'tiles.txt'}")
    return 0


def _report_rows(reports, sweep_cfgs=None):
    rows = []
    for i, rep in enumerate(reports):
        row = {}
        if sweep_cfgs is not None:
            row.update(rep.config)
        row.update({k: getattr(rep, k) for k in REPORT_FIELDS
                    if k != "active_rows_per_division"})
        row["active_rows_per_division"] = " ".join(
            f"{v:.2f}" for v in rep.active_rows_per_division)
        rows.append(row)
    return rows


def _write_csv(path: Path, rows: list[dict]):
    if not rows:
        raise SystemExit(f"nothing to write to {path}")
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)


def _sim_pipeline(args):
    tp = _tech(args)
    s = _resolve_size(args, tp)
    _, _, test_n, tree = _load_split_train(args)
    lut = encoding.compile_tree(tree)
    ts = tiles.map_lut(lut, s, seed=args.seed,
                       masked_padding=not args.unmasked_padding)
    return tp, s, test_n, tree, lut, ts


def _parse_grid(text):
    return tuple(float(v) for v in text.split(",")) if text else (0.0,)


def cmd_simulate(args) -> int:
    tp, s, test_n, tree, lut, ts = _sim_pipeline(args)
    fc = FaultConfig(p_sa0=args.saf0 / 100.0, p_sa1=args.saf1 / 100.0,
                     sigma_sa=args.sigma_sa, sigma_in=args.sigma_in,
                     seed=args.seed)
    cfg = SimConfig(mode=args.mode, selective_precharge=not args.no_sp,
                    pipelined=args.pipelined, fault=fc, trials=args.trials)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    echo = {k: getattr(args, k) for k in
            ("data", "seed", "mode", "trials", "saf0", "saf1",
             "sigma_sa", "sigma_in", "test_frac")}
    echo.update({"size": s, "selective_precharge": not args.no_sp})

    rep = engine.run_inference(ts, test_n, cfg, tp, tree=tree, config_echo=echo)
    _write_json(out / "report.json",
                {k: getattr(rep, k) for k in REPORT_FIELDS}, echo)
    _write_csv(out / "report.csv", _report_rows([rep]))
    print(f"accuracy {rep.accuracy:.4f} (golden {rep.golden_accuracy:.4f}, "
          f"loss {rep.accuracy_loss_pct:.2f}%)")
    print(f"energy {rep.energy_per_dec_nj:.4f} nJ/dec, "
          f"latency {rep.latency_per_dec_ns:.2f} ns, "
          f"throughput {rep.throughput:.3e} dec/s")
    print(f"EDP {rep.edp_js:.3e} J*s, area {rep.area_mm2:.4f} mm^2, "
          f"FOM {rep.fom:.3e}")

    if args.compare_sp:
        alt = engine.run_inference(
            ts, test_n, dataclasses.replace(cfg, selective_precharge=args.no_sp),
            tp, tree=tree)
        with_sp, without_sp = (rep, alt) if not args.no_sp else (alt, rep)
        red = 100.0 * (1.0 - with_sp.edp_js / without_sp.edp_js)
        print(f"EDP reduction with selective precharge: {red:.1f}%")
    return 0


def cmd_sweep(args) -> int:
    tp = _tech(args)
    _, _, test_n, tree = _load_split_train(args)
    lut = encoding.compile_tree(tree)
    s_grid = tuple(int(v) for v in args.sizes.split(","))
    cfg = SimConfig(mode=args.mode, trials=args.trials)
    reports = engine.sweep(
        lut, test_n, cfg,
        s_grid=s_grid,
        p_sa0_grid=tuple(v / 100.0 for v in _parse_grid(args.saf0)),
        p_sa1_grid=tuple(v / 100.0 for v in _parse_grid(args.saf1)),
        sigma_sa_grid=_parse_grid(args.sigma_sa),
        sigma_in_grid=_parse_grid(args.sigma_in),
        tp=tp, tree=tree, master_seed=args.seed, map_seed=args.seed)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write_csv(out / "sweep.csv", _report_rows(reports, sweep_cfgs=True))
    print(f"{len(reports)} configurations -> {out / 'sweep.csv'}")
    return 0


def cmd_report(args) -> int:
    run_dir = Path(args.run_dir)
    rows = []
    for path in sorted(run_dir.glob("**/*.csv")):
        if path.name in ("report.csv", "sweep.csv"):
            with open(path, newline="") as fh:
                rows.extend(csv.DictReader(fh))
    if not rows:
        raise SystemExit(f"no report/sweep CSVs under {run_dir}")
    out = Path(args.out or run_dir)
    out.mkdir(parents=True, exist_ok=True)

    def table(name, fields):
        picked = [{k: r[k] for k in fields if k in r} for r in rows]
        _write_csv(out / name, picked)

    table("energy_vs_throughput.csv",
          ["s", "energy_per_dec_nj", "seq_throughput", "pipe_throughput"])
    table("edp.csv", ["s", "edp_js", "latency_per_dec_ns"])
    table("fom.csv", ["s", "edp_js", "area_mm2", "fom"])
    table("accuracy_loss.csv",
          ["s", "p_sa0", "p_sa1", "sigma_sa", "sigma_in",
           "accuracy", "golden_accuracy", "accuracy_loss_pct"])
    print(f"consolidated tables written to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="treecam",
        description="Compile decision trees to ternary CAM lookup tables and "
                    "simulate inference on tiled resistive TCAM arrays.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train a CART tree and export it")
    _add_train_opts(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("compile", help="compile a tree file into a ternary LUT")
    p.add_argument("--tree", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("map", help="partition a LUT dump onto S x S tiles")
    p.add_argument("--lut", required=True)
    _add_geometry_opts(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--unmasked-padding", action="store_true",
                   help="worst-case energy stance: padding cells dissipate")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("simulate", help="full pipeline from a dataset")
    _add_train_opts(p)
    _add_geometry_opts(p)
    p.add_argument("--mode", choices=("ideal", "analog"), default="ideal")
    p.add_argument("--trials", type=int, default=1)
    p.add_argument("--saf0", type=float, default=0.0, help="stuck-at-0 rate in %%")
    p.add_argument("--saf1", type=float, default=0.0, help="stuck-at-1 rate in %%")
    p.add_argument("--sigma-sa", type=float, default=0.0)
    p.add_argument("--sigma-in", type=float, default=0.0)
    p.add_argument("--no-sp", action="store_true",
                   help="disable selective precharge")
    p.add_argument("--compare-sp", action="store_true",
                   help="also run with the opposite precharge setting")
    p.add_argument("--pipelined", action="store_true")
    p.add_argument("--unmasked-padding", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="Cartesian non-ideality sweep")
    _add_train_opts(p)
    p.add_argument("--tech", default=None)
    p.add_argument("--sizes", default="128", help="comma list of S values")
    p.add_argument("--saf0", default="0", help="comma list of rates in %%")
    p.add_argument("--saf1", default="0")
    p.add_argument("--sigma-sa", default="0")
    p.add_argument("--sigma-in", default="0")
    p.add_argument("--mode", choices=("ideal", "analog"), default="analog")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="aggregate run CSVs into summary tables")
    p.add_argument("run_dir")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
