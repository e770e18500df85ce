"""Rebuild ``src/anchornys/data/abalone.csv`` from the keel-ds wheel.

The UCI Abalone table is not downloadable from the build sandbox; the KEEL
copy (``abalone19.dat``, 4174 rows) ships inside the ``keel-ds`` wheel on
PyPI.  Sex is encoded numerically (M=1, F=2, I=3) and the class label is
dropped, which leaves the eight input attributes.

Usage::

    pip download keel-ds --no-deps -d /tmp/keel
    python scripts/extract_abalone.py /tmp/keel/keel_ds-*.whl
"""
import csv
import sys
import zipfile
from pathlib import Path

MEMBER = "keel_ds/data/imbalanced/raw/abalone19.dat"
SEX_CODE = {"M": 1, "F": 2, "I": 3}
HEADER = ["sex", "length", "diameter", "height", "whole_weight",
          "shucked_weight", "viscera_weight", "shell_weight"]


def main(wheel):
    text = zipfile.ZipFile(wheel).read(MEMBER).decode()
    out = Path(__file__).resolve().parents[1] / "src" / "anchornys" / "data" / "abalone.csv"
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        fields = [f.strip() for f in line.split(",")]
        rows.append([SEX_CODE[fields[0]]] + [float(f) for f in fields[1:8]])
    with open(out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        w.writerows(rows)
    print(f"wrote {len(rows)} rows to {out}")


if __name__ == "__main__":
    main(sys.argv[1])
