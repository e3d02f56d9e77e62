"""Demo dataset fetcher.

Iris ships bundled (regenerated locally, no network needed). The other
benchmark datasets are downloaded from their public sources when the
network is reachable; an unreachable source is reported per dataset in the
manifest and never fails the run. All CSVs use the loader's expected
layout: one header row, numeric feature columns, the class label last.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

# name -> (source url, header names with the label last). The raw files
# are headerless CSVs whose last column is already the class label.
REMOTE = {
    "haberman": (
        "https://archive.ics.uci.edu/ml/machine-learning-databases/haberman/haberman.data",
        ["age", "op_year", "axillary_nodes", "survival"],
    ),
    "diabetes": (
        "https://raw.githubusercontent.com/jbrownlee/Datasets/master/pima-indians-diabetes.data.csv",
        ["pregnancies", "glucose", "blood_pressure", "skin_thickness",
         "insulin", "bmi", "pedigree", "age", "outcome"],
    ),
    "banknote": (
        "https://archive.ics.uci.edu/ml/machine-learning-databases/00267/data_banknote_authentication.txt",
        ["variance", "skewness", "curtosis", "entropy", "class"],
    ),
}


def write_iris(path: Path) -> int:
    from sklearn.datasets import load_iris

    data = load_iris()
    names = ["sepal_length", "sepal_width", "petal_length", "petal_width"]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names + ["species"])
        for row, label in zip(data.data, data.target):
            w.writerow([f"{v:g}" for v in row]
                       + [data.target_names[label]])
    return len(data.data)


def _download(name: str, url: str, header: list[str], path: Path) -> int:
    import requests

    resp = requests.get(url, timeout=10)
    resp.raise_for_status()
    rows = [r for r in csv.reader(io.StringIO(resp.text)) if r]
    if any(len(r) != len(header) for r in rows):
        raise ValueError(f"{name}: unexpected column count upstream")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return len(rows)


def fetch_demo_datasets(out_dir) -> dict:
    """Populate ``out_dir`` with demo CSVs and return the manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {}

    n = write_iris(out / "iris.csv")
    manifest["iris"] = {"status": "bundled", "source": "scikit-learn",
                        "rows": n, "features": 4}

    for name, (url, header) in REMOTE.items():
        entry = {"source": url, "features": len(header) - 1}
        try:
            entry["rows"] = _download(name, url, header, out / f"{name}.csv")
            entry["status"] = "downloaded"
        except Exception as exc:  # noqa: BLE001 - skips must be non-fatal
            entry["status"] = "skipped"
            entry["error"] = str(exc)
        manifest[name] = entry

    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return manifest
