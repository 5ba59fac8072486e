#!/usr/bin/env python3
"""Download the UCI benchmark tables and store them as headed CSV in data/.

    python scripts/fetch_datasets.py [--dest DIR] [--force]

Haberman, Page blocks and Blood transfusion are fetched from the UCI
archive (CC BY 4.0).  Existing files are left alone unless --force is given.
Page blocks ships LZW-compressed (.Z); ``gzip -dc`` is used to unpack it.
"""

from __future__ import annotations

import argparse
import csv
import io
import subprocess
import sys
import urllib.request
import zipfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]

SOURCES = {
    "haberman.csv": {
        "url": "https://archive.ics.uci.edu/static/public/43/haberman+s+survival.zip",
        "member": "haberman.data",
        "header": ["age", "op_year", "axillary_nodes", "survival_status"],
        "rows": 306,
    },
    "page-blocks.csv": {
        "url": "https://archive.ics.uci.edu/static/public/78/page+blocks+classification.zip",
        "member": "page-blocks.data",
        "header": [
            "height", "length", "area", "eccen", "p_black", "p_and",
            "mean_tr", "blackpix", "blackand", "wb_trans", "class",
        ],
        "rows": 5473,
    },
    "blood-transfusion.csv": {
        "url": "https://archive.ics.uci.edu/static/public/176/blood+transfusion+service+center.zip",
        "member": "transfusion.data",
        "header": ["recency", "frequency", "monetary", "time", "donated_march_2007"],
        "rows": 748,
    },
}


def _member_bytes(archive: bytes, name: str) -> bytes:
    with zipfile.ZipFile(io.BytesIO(archive)) as zf:
        names = zf.namelist()
        for n in names:
            base = n.rsplit("/", 1)[-1]
            if base == name:
                return zf.read(n)
            if base == name + ".Z":
                packed = zf.read(n)
                return subprocess.run(["gzip", "-dc"], input=packed, capture_output=True, check=True).stdout
            if base.endswith(".zip"):
                try:
                    return _member_bytes(zf.read(n), name)
                except KeyError:
                    pass
    raise KeyError(f"{name} not found in archive (members: {names})")


def _rows(text: str) -> list[list[str]]:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        cells = line.split(",") if "," in line else line.split()
        try:
            float(cells[0])
        except ValueError:
            continue  # a header line
        rows.append([c.strip() for c in cells])
    return rows


def fetch(name: str, dest: Path, force: bool) -> None:
    src = SOURCES[name]
    out = dest / name
    if out.exists() and not force:
        print(f"{out}: exists, skipped")
        return
    with urllib.request.urlopen(src["url"], timeout=60) as resp:
        archive = resp.read()
    rows = _rows(_member_bytes(archive, src["member"]).decode("utf-8", "replace"))
    if len(rows) != src["rows"] or any(len(r) != len(src["header"]) for r in rows):
        raise ValueError(f"{name}: expected {src['rows']} rows of {len(src['header'])} fields, got {len(rows)}")
    with out.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(src["header"])
        w.writerows(rows)
    print(f"{out}: {len(rows)} rows")


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dest", type=Path, default=ROOT / "data")
    ap.add_argument("--force", action="store_true")
    ap.add_argument("names", nargs="*", help=f"any of {', '.join(SOURCES)} (default: all)")
    args = ap.parse_args(argv)
    unknown = set(args.names) - set(SOURCES)
    if unknown:
        ap.error(f"unknown dataset(s): {', '.join(sorted(unknown))}")
    args.dest.mkdir(parents=True, exist_ok=True)
    failed = 0
    for name in args.names or SOURCES:
        try:
            fetch(name, args.dest, args.force)
        except Exception as exc:
            print(f"{name}: failed: {exc}", file=sys.stderr)
            failed += 1
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
