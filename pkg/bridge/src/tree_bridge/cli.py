"""Command-line front end: `tree-bridge export` and `tree-bridge fetch-data`."""

from __future__ import annotations

import argparse
import sys

from .datasets import fetch_demo_datasets
from .export import ExportError, export_fitted_tree, load_model


def cmd_export(args) -> int:
    model = load_model(args.model)
    features = args.feature_names.split(",") if args.feature_names else None
    classes = args.class_names.split(",") if args.class_names else None
    out = export_fitted_tree(model, args.out, features, classes)
    print(f"tree written to {out}")
    return 0


def cmd_fetch_data(args) -> int:
    manifest = fetch_demo_datasets(args.out)
    for name, entry in manifest.items():
        note = entry.get("rows", entry.get("error", ""))
        print(f"{name}: {entry['status']} ({note})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tree-bridge",
        description="Export scikit-learn decision trees to the "
                    "tree-interchange JSON format.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("export", help="export a pickled fitted tree")
    p.add_argument("--model", required=True, help="pickled classifier path")
    p.add_argument("--out", required=True, help="output JSON path")
    p.add_argument("--feature-names", default=None, help="comma list")
    p.add_argument("--class-names", default=None, help="comma list")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("fetch-data", help="populate a demo dataset directory")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fetch_data)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ExportError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
