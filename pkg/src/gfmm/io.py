"""Dataset ingestion and model (de)serialisation."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import FeatureScaler, ModelParams, TrainedModel
from .refinement import EnsembleModel

FORMAT_NAME = "gfmm-model"
FORMAT_VERSION = 1


class DataError(ValueError):
    """Malformed or missing input data."""


class ModelFormatError(ValueError):
    """A model file that cannot be read by this version."""


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    class_names: dict = field(default_factory=dict)
    feature_names: list = field(default_factory=list)

    @property
    def n_samples(self) -> int:
        return self.X.shape[0]


def encode_labels(raw, mapping: dict | None = None) -> tuple[np.ndarray, dict]:
    """Map label strings to ids ``1..K`` in order of first appearance.

    Returns the ids and the ``{id: name}`` mapping.  An existing ``mapping``
    is extended, never reordered.
    """
    names = dict(mapping or {})
    ids = {name: i for i, name in names.items()}
    out = np.empty(len(raw), dtype=np.int64)
    for r, lab in enumerate(raw):
        lab = str(lab).strip()
        if lab not in ids:
            ids[lab] = len(ids) + 1
            names[ids[lab]] = lab
        out[r] = ids[lab]
    return out, names


def load_csv(path, label_column: int | None = -1, has_header: bool = True) -> Dataset:
    """Read a numeric feature table with one label column.

    ``label_column`` may be negative (counted from the end) or ``None`` for
    unlabelled data.
    """
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such file")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    header = []
    if has_header and rows:
        header, rows = rows[0], rows[1:]
    if not rows:
        raise DataError(f"{path}: no data rows")
    width = len(rows[0])
    first = 2 if has_header else 1
    for r, row in enumerate(rows):
        if len(row) != width:
            raise DataError(f"{path}: row {r + first} has {len(row)} columns, expected {width}")
    if label_column is not None:
        lc = label_column + width if label_column < 0 else label_column
        if not 0 <= lc < width:
            raise DataError(f"{path}: label column {label_column} out of range for {width} columns")
    else:
        lc = None
    feat_cols = [c for c in range(width) if c != lc]
    if not feat_cols:
        raise DataError(f"{path}: no feature columns")
    X = np.empty((len(rows), len(feat_cols)))
    for r, row in enumerate(rows):
        for j, c in enumerate(feat_cols):
            try:
                X[r, j] = float(row[c])
            except ValueError:
                raise DataError(
                    f"{path}: non-numeric value {row[c]!r} at row {r + first}, column {c + 1}"
                ) from None
    if lc is None:
        y, names = np.zeros(len(rows), dtype=np.int64), {}
    else:
        y, names = encode_labels([row[lc] for row in rows])
    feature_names = [header[c] for c in feat_cols] if header else []
    return Dataset(X, y, names, feature_names)


# -- models ------------------------------------------------------------------


def _model_doc(model: TrainedModel) -> dict:
    return {
        "params": {"theta": model.params.theta, "gamma": model.params.gamma.tolist()},
        "boxes": [
            {
                "v": model.V[i].tolist(),
                "w": model.W[i].tolist(),
                "label": int(model.labels[i]),
                "n": int(model.cardinality[i]),
            }
            for i in range(model.n_boxes)
        ],
    }


def _shared_doc(model) -> dict:
    return {
        "scaler": {"min": model.scaler.data_min.tolist(), "max": model.scaler.data_max.tolist()},
        "class_catalog": sorted(int(c) for c in model.class_catalog),
        "class_names": {str(k): v for k, v in sorted(model.class_names.items())},
    }


def _render(doc) -> str:
    # one box / one vector per line: readable diffs without a number per line
    inline = {}

    def mark(obj):
        if isinstance(obj, dict):
            if {"v", "w", "label", "n"} <= obj.keys():
                key = f"@@{len(inline)}@@"
                inline[key] = json.dumps(obj, separators=(", ", ": "))
                return key
            return {k: mark(v) for k, v in obj.items()}
        if isinstance(obj, list):
            if all(isinstance(x, (int, float)) for x in obj):
                key = f"@@{len(inline)}@@"
                inline[key] = json.dumps(obj, separators=(", ", ": "))
                return key
            return [mark(x) for x in obj]
        return obj

    text = json.dumps(mark(doc), indent=2)
    for key, val in inline.items():
        text = text.replace(f'"{key}"', val, 1)
    return text + "\n"


def dumps_model(model, **meta) -> str:
    doc = {"format": FORMAT_NAME, "version": FORMAT_VERSION}
    if isinstance(model, EnsembleModel):
        doc["kind"] = "ensemble"
        doc.update(_shared_doc(model))
        doc["members"] = [
            {"seed": s, **_model_doc(m)} for s, m in zip(model.seeds or [0] * len(model), model.members)
        ]
    else:
        doc["kind"] = "single"
        doc.update(_shared_doc(model))
        doc.update(_model_doc(model))
    if meta:
        doc["meta"] = meta
    return _render(doc)


def save_model(model, path, **meta) -> None:
    Path(path).write_text(dumps_model(model, **meta), encoding="utf-8")


def _build_single(doc, scaler, catalog, names) -> TrainedModel:
    p = doc["params"]
    gamma = np.asarray(p["gamma"], dtype=float)
    params = ModelParams(p["theta"], gamma)
    boxes = doc["boxes"]
    n = gamma.size
    V = np.array([b["v"] for b in boxes], dtype=float).reshape(-1, n)
    W = np.array([b["w"] for b in boxes], dtype=float).reshape(-1, n)
    return TrainedModel(
        V,
        W,
        [b["label"] for b in boxes],
        [b["n"] for b in boxes],
        params,
        scaler,
        frozenset(catalog),
        names,
    )


def loads_model(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"corrupt model file: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise ModelFormatError("not a gfmm model file")
    version = doc.get("version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format version {version!r} (this build reads version {FORMAT_VERSION})"
        )
    try:
        scaler = FeatureScaler(doc["scaler"]["min"], doc["scaler"]["max"])
        catalog = doc["class_catalog"]
        names = {int(k): v for k, v in doc["class_names"].items()}
        kind = doc["kind"]
        if kind == "single":
            return _build_single(doc, scaler, catalog, names)
        if kind == "ensemble":
            members = [_build_single(m, scaler, catalog, names) for m in doc["members"]]
            return EnsembleModel(members, [m["seed"] for m in doc["members"]])
        raise ModelFormatError(f"unknown model kind {kind!r}")
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelFormatError):
            raise
        raise ModelFormatError(f"corrupt model file: {exc!r}") from None


def load_model(path):
    path = Path(path)
    if not path.is_file():
        raise DataError(f"{path}: no such file")
    return loads_model(path.read_text(encoding="utf-8"))
