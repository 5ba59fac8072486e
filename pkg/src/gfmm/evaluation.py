"""Experiment harness: stratified folds, theta sweeps, label noise, shuffles.

Every random choice is derived from the experiment's master seed, so a
rerun reproduces all records except the wall-clock ``train_seconds``.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import time
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .core import ModelParams, as_patterns, fit_scaler
from .iol import train_iol
from .onln import train_online
from .prediction import predict_many
from .refinement import DEFAULT_MEMBERS, predict_ensemble_many, prune, train_ensemble

log = logging.getLogger(__name__)

ALGORITHMS = ("onln", "onln+manhattan", "iol", "iol-ensemble")
DEFAULT_THETAS = tuple(round(0.1 * i, 1) for i in range(1, 8))
METRIC_COLUMNS = (
    "algorithm", "theta", "fold", "rep", "seed", "noise", "pruned",
    "error_pct", "boxes", "train_seconds",
)


@dataclass(frozen=True)
class ExperimentSpec:
    dataset: str | None = None
    folds: int = 4
    thetas: tuple = DEFAULT_THETAS
    algorithms: tuple = ("iol",)
    noise: float = 0.0
    pruning: bool = False
    prune_threshold: float = 0.5
    repetitions: int = 1
    members: int = DEFAULT_MEMBERS
    gamma: float = 1.0
    seed: int = 0
    label_column: int = -1
    has_header: bool = True

    def __post_init__(self):
        thetas = tuple(float(t) for t in self.thetas)
        if not thetas or any(not 0.0 < t <= 1.0 for t in thetas):
            raise ValueError("theta values must lie in (0, 1]")
        object.__setattr__(self, "thetas", thetas)
        algos = (self.algorithms,) if isinstance(self.algorithms, str) else tuple(self.algorithms)
        unknown = set(algos) - set(ALGORITHMS)
        if unknown or not algos:
            raise ValueError(f"unknown algorithms {sorted(unknown)}; choose from {ALGORITHMS}")
        object.__setattr__(self, "algorithms", algos)
        if not 0.0 <= self.noise < 1.0:
            raise ValueError("noise fraction must lie in [0, 1)")
        if self.folds < 2 + int(self.pruning):
            raise ValueError("too few folds for the requested protocol")
        if self.repetitions < 1 or self.members < 1:
            raise ValueError("repetitions and members must be >= 1")


@dataclass(frozen=True)
class MetricsRecord:
    algorithm: str
    theta: float
    fold: int
    rep: int
    seed: int
    noise: float
    pruned: bool
    error_pct: float
    boxes: int
    train_seconds: float


# -- splitting and corruption -------------------------------------------------


def stratified_folds(labels, k: int, seed=0) -> list[np.ndarray]:
    """Partition sample indexes into ``k`` class-stratified folds.

    Each class is shuffled and dealt round-robin, continuing where the
    previous class stopped, so per-class and total fold sizes differ by at
    most one.
    """
    labels = np.asarray(labels)
    if k < 2:
        raise ValueError("need at least 2 folds")
    if k > labels.size:
        raise ValueError(f"cannot split {labels.size} samples into {k} folds")
    rng = np.random.default_rng(seed)
    folds = [[] for _ in range(k)]
    nxt = 0
    for c in np.unique(labels):
        idx = rng.permutation(np.flatnonzero(labels == c))
        for i in idx:
            folds[nxt].append(int(i))
            nxt = (nxt + 1) % k
    return [np.array(sorted(f), dtype=np.int64) for f in folds]


def noise_count(fraction: float, n: int) -> int:
    """Number of labels to flip: ``fraction * n`` rounded half up."""
    return int(math.floor(fraction * n + 0.5))


def inject_label_noise(labels, fraction: float, seed=0, classes=None) -> np.ndarray:
    """Give ``noise_count(fraction, N)`` distinct samples a different random label."""
    labels = np.asarray(labels)
    if not 0.0 <= fraction < 1.0:
        raise ValueError("noise fraction must lie in [0, 1)")
    out = labels.copy()
    n_flip = noise_count(fraction, labels.size)
    if n_flip == 0:
        return out
    classes = np.unique(labels) if classes is None else np.unique(classes)
    if classes.size < 2:
        raise ValueError("label noise needs at least two classes")
    rng = np.random.default_rng(seed)
    for i in rng.choice(labels.size, size=n_flip, replace=False):
        others = classes[classes != labels[i]]
        out[i] = others[rng.integers(others.size)]
    return out


# -- running ----------------------------------------------------------------


def _derive(*key) -> int:
    return int(np.random.SeedSequence([int(k) for k in key]).generate_state(1)[0])


def _split(folds, test: int, pruning: bool):
    k = len(folds)
    val = (test + 1) % k if pruning else None
    train = [f for i, f in enumerate(folds) if i not in (test, val)]
    return np.concatenate(train), (folds[val] if pruning else None), folds[test]


def _fit(algorithm, patterns, params, seed, members, scaler):
    if algorithm == "iol-ensemble":
        return train_ensemble(patterns, params, members, seed=seed, scaler=scaler)
    trainer = train_iol if algorithm == "iol" else train_online
    return trainer(patterns, params, scaler=scaler)


def _predict(algorithm, model, X, seed):
    if algorithm == "iol-ensemble":
        return predict_ensemble_many(X, X, model, "cardinality", seed)
    strategy = {"onln": "random", "onln+manhattan": "manhattan", "iol": "cardinality"}[algorithm]
    return predict_many(X, X, model, strategy, seed)


def _prune(model, validation, threshold):
    if hasattr(model, "members"):
        return type(model)([prune(m, validation, threshold) for m in model.members], model.seeds)
    return prune(model, validation, threshold)


def _n_boxes(model) -> int:
    if hasattr(model, "members"):
        return int(sum(m.n_boxes for m in model.members))
    return model.n_boxes


def run_experiment(spec: ExperimentSpec, X=None, y=None) -> list[MetricsRecord]:
    """Run every (algorithm, fold, theta, repetition) cell of ``spec``.

    Data comes from ``X``/``y`` when given, else from ``spec.dataset``.
    Without pruning each fold in turn is the test set and the rest train;
    with pruning the fold after the test fold validates and the remaining
    folds train, and two records (before and after pruning) are emitted per
    cell.  Label noise corrupts training and validation labels only.
    """
    if X is None:
        from .io import load_csv

        ds = load_csv(spec.dataset, spec.label_column, spec.has_header)
        X, y = ds.X, ds.y
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    classes = np.unique(y)
    folds = stratified_folds(y, spec.folds, _derive(spec.seed, 1))
    records = []
    for f in range(spec.folds):
        train_idx, val_idx, test_idx = _split(folds, f, spec.pruning)
        scaler = fit_scaler(X[train_idx])
        Xs = np.clip(scaler.transform(X), 0.0, 1.0)
        y_noisy = y.copy()
        if spec.noise > 0:
            seen = train_idx if val_idx is None else np.concatenate([train_idx, val_idx])
            y_noisy[seen] = inject_label_noise(y[seen], spec.noise, _derive(spec.seed, 2, f), classes)
        validation = None if val_idx is None else as_patterns(Xs[val_idx], None, y_noisy[val_idx])
        for algo in spec.algorithms:
            for theta in spec.thetas:
                params = ModelParams.create(theta, X.shape[1], spec.gamma)
                for rep in range(spec.repetitions):
                    seed = _derive(spec.seed, 3, f, rep)
                    order = np.random.default_rng(seed).permutation(train_idx)
                    patterns = as_patterns(Xs[order], None, y_noisy[order])
                    try:
                        t0 = time.perf_counter()
                        model = _fit(algo, patterns, params, seed, spec.members, scaler)
                        elapsed = time.perf_counter() - t0
                        variants = [(False, model)]
                        if spec.pruning:
                            variants.append((True, _prune(model, validation, spec.prune_threshold)))
                        for pruned, m in variants:
                            pred = _predict(algo, m, Xs[test_idx], seed)
                            err = 100.0 * np.count_nonzero(pred != y[test_idx]) / test_idx.size
                            records.append(
                                MetricsRecord(
                                    algo, theta, f, rep, seed, spec.noise, pruned,
                                    float(err), _n_boxes(m), elapsed,
                                )
                            )
                    except Exception:
                        log.exception("cell failed: algorithm=%s theta=%s fold=%d rep=%d", algo, theta, f, rep)
    return records


# -- reporting ----------------------------------------------------------------


@dataclass(frozen=True)
class SummaryRow:
    algorithm: str
    theta: float
    noise: float
    pruned: bool
    count: int
    mean_error: float
    std_error: float
    mean_boxes: float
    mean_seconds: float


def _pstd(values) -> float:
    values = np.asarray(values, dtype=float)
    return float(np.sqrt(np.mean((values - values.mean()) ** 2)))


def summarize(records: Iterable[MetricsRecord]) -> list[SummaryRow]:
    """Mean and population std of test error per (algorithm, theta, noise, pruned)."""
    groups = defaultdict(list)
    for r in records:
        groups[(r.algorithm, r.theta, r.noise, r.pruned)].append(r)
    if not groups:
        raise ValueError("nothing to summarise")
    rows = []
    for key in sorted(groups):
        g = groups[key]
        err = [r.error_pct for r in g]
        rows.append(
            SummaryRow(
                *key,
                count=len(g),
                mean_error=float(np.mean(err)),
                std_error=_pstd(err),
                mean_boxes=float(np.mean([r.boxes for r in g])),
                mean_seconds=float(np.mean([r.train_seconds for r in g])),
            )
        )
    return rows


def shuffle_std(records: Iterable[MetricsRecord]) -> dict:
    """Per (algorithm, theta): population std of error across repetitions, averaged over folds."""
    cells = defaultdict(list)
    for r in records:
        cells[(r.algorithm, r.theta, r.noise, r.pruned, r.fold)].append(r.error_pct)
    per = defaultdict(list)
    for (algo, theta, _, _, _), errs in sorted(cells.items()):
        per[(algo, theta)].append(_pstd(errs))
    return {k: float(np.mean(v)) for k, v in per.items()}


def format_metrics_csv(records: Sequence[MetricsRecord], master_seed=None) -> str:
    buf = io.StringIO()
    if master_seed is not None:
        buf.write(f"# master_seed={master_seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(METRIC_COLUMNS)
    for r in records:
        d = asdict(r)
        d["pruned"] = int(r.pruned)
        d["train_seconds"] = f"{r.train_seconds:.6f}"
        w.writerow([d[c] for c in METRIC_COLUMNS])
    return buf.getvalue()


def write_metrics_csv(records, path, master_seed=None) -> None:
    Path(path).write_text(format_metrics_csv(records, master_seed), encoding="utf-8")


def read_metrics_csv(path) -> list[MetricsRecord]:
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [l for l in fh if not l.startswith("#")]
    out = []
    for row in csv.DictReader(lines):
        out.append(
            MetricsRecord(
                row["algorithm"], float(row["theta"]), int(row["fold"]), int(row["rep"]),
                int(row["seed"]), float(row["noise"]), bool(int(row["pruned"])),
                float(row["error_pct"]), int(row["boxes"]), float(row["train_seconds"]),
            )
        )
    return out


def format_summary_csv(rows: Sequence[SummaryRow]) -> str:
    buf = io.StringIO()
    buf.write("# std_error uses the population convention (divide by count)\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([f for f in SummaryRow.__dataclass_fields__])
    for r in rows:
        w.writerow([int(v) if isinstance(v, bool) else v for v in asdict(r).values()])
    return buf.getvalue()


def parse_thetas(text: str) -> tuple[float, ...]:
    """Parse ``"0.1..0.7"`` (step 0.1), ``"0.1..0.7:0.05"`` or ``"0.1,0.3,0.5"``."""
    text = text.strip()
    if ".." in text:
        rng, _, step = text.partition(":")
        lo, hi = (float(s) for s in rng.split(".."))
        step = float(step) if step else 0.1
        if step <= 0 or hi < lo:
            raise ValueError(f"bad theta range {text!r}")
        n = int(round((hi - lo) / step))
        return tuple(round(lo + i * step, 10) for i in range(n + 1))
    return tuple(float(s) for s in text.split(",") if s.strip())
