"""Locating the benchmark CSV files used by the experiments.

Files are looked up in ``$GFMM_DATA_DIR`` and then in the repository's
``data/`` directory.  ``scripts/fetch_datasets.py`` downloads the UCI
originals into ``data/``.
"""

from __future__ import annotations

import os
from pathlib import Path

#: name -> file name.  All files carry a header row and the label last.
KNOWN = {
    "haberman": "haberman.csv",
    "page-blocks": "page-blocks.csv",
    "blood-transfusion": "blood-transfusion.csv",
    # binarised KEEL derivative of page-blocks (text vs. non-text), 5472 rows
    "page-blocks-binary": "page-blocks-binary.csv",
}

REPO_DATA = Path(__file__).resolve().parents[2] / "data"


def search_path() -> list[Path]:
    dirs = []
    env = os.environ.get("GFMM_DATA_DIR")
    if env:
        dirs.append(Path(env))
    dirs.append(REPO_DATA)
    return dirs


def find_dataset(name: str) -> Path | None:
    """Path of the named dataset, or ``None`` when it is not available locally."""
    fname = KNOWN.get(name, name)
    for d in search_path():
        p = d / fname
        if p.is_file():
            return p
    return None
