"""Export the evaluation datasets to the CSV layout the CLI consumes.

Iris ships with scikit-learn and is written directly. The ceramic
chemical-composition dataset (UCI id 583, 88 samples, body/glaze parts)
cannot be redistributed here; point --ceramic-src at the downloaded
"Chemical Composion of Ceramic.csv" and this script converts it: feature
columns are every numeric composition column, the truth label is the part
(Body=1, Glaze=2), samples as rows.

Usage:
    python scripts/make_datasets.py --out data
    python scripts/make_datasets.py --out data --ceramic-src /path/to/ceramic.csv
"""

from __future__ import annotations

import argparse
import csv
from pathlib import Path

import numpy as np


def write_iris(out: Path) -> None:
    from sklearn.datasets import load_iris

    d = load_iris()
    np.savetxt(out / "iris.csv", d.data, delimiter=",", fmt="%.17g")
    labels = d.target + 1  # 1..3; 0 is reserved for outliers
    np.savetxt(out / "iris_labels.csv", labels[None, :], delimiter=",", fmt="%d")
    print(f"wrote {out / 'iris.csv'} (150 samples x 4 features) and labels")


def convert_ceramic(src: Path, out: Path) -> None:
    with open(src, newline="", encoding="utf-8-sig") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = list(reader)
    part_col = next(i for i, name in enumerate(header) if name.strip().lower() == "part")
    numeric_cols = []
    for i in range(len(header)):
        if i == part_col:
            continue
        try:
            float(rows[0][i])
            numeric_cols.append(i)
        except ValueError:
            continue
    X = np.array([[float(r[i]) for i in numeric_cols] for r in rows])
    labels = np.array([1 if r[part_col].strip().lower() == "body" else 2 for r in rows])
    np.savetxt(out / "ceramic.csv", X, delimiter=",", fmt="%.17g")
    np.savetxt(out / "ceramic_labels.csv", labels[None, :], delimiter=",", fmt="%d")
    print(f"wrote {out / 'ceramic.csv'} ({X.shape[0]} samples x {X.shape[1]} features) and labels")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data")
    ap.add_argument("--ceramic-src", default=None,
                    help="path to the UCI ceramic composition CSV")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_iris(out)
    if args.ceramic_src:
        convert_ceramic(Path(args.ceramic_src), out)
    else:
        print("ceramic source not given; skipping (see --ceramic-src)")


if __name__ == "__main__":
    main()
