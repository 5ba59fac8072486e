"""Winner-take-all classification with selectable tie-breaking.

Each class scores the best membership among its boxes.  When boxes of
several classes share the top membership the tie is settled by one of:

``cardinality``
    class probabilities weighted by how many samples each winning box has
    absorbed (the default);
``manhattan``
    the winner whose centre is closest to the query's centre;
``random``
    a seeded uniform draw among the tied classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import UNLABELED, DimensionError, Hyperbox, Pattern, TrainedModel
from .membership import membership_matrix

STRATEGIES = ("cardinality", "manhattan", "random")

#: Memberships closer than this to the best one count as tied.
TIE_EPS = 1e-12


class NoLabeledBoxesError(ValueError):
    """The model has no labelled hyperbox and cannot classify anything."""


@dataclass
class ClassScores:
    scores: dict
    winner: int
    b_win: float
    tie_broken: bool
    tie_probabilities: dict | None = None


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def cardinality_probabilities(labels, counts, mems) -> dict:
    """P(class | x) over the winning boxes, weighted by cardinality * membership."""
    labels = np.asarray(labels)
    weights = np.asarray(counts, dtype=float) * np.asarray(mems, dtype=float)
    total = weights.sum()
    if total <= 0.0:
        # every winner has membership 0: fall back to cardinality alone
        weights = np.asarray(counts, dtype=float)
        total = weights.sum()
    return {int(c): float(weights[labels == c].sum() / total) for c in np.unique(labels)}


def _cardinality_choice(labels, counts, mems) -> tuple[int, dict]:
    # winners arrive in creation order
    b_win = max(mems)
    probs = cardinality_probabilities(labels, counts, mems)
    if b_win == 1.0:
        for lab, n in zip(labels, counts):
            if n == 1:
                return int(lab), probs
    best = max(probs.values())
    winner = min(c for c, p in probs.items() if best - p <= TIE_EPS)
    return winner, probs


def _manhattan_choice(mid, labels, V, W) -> int:
    dist = np.abs(mid - (V + W) / 2).sum(axis=1)
    return int(labels[int(np.argmin(dist))])


def _random_choice(labels, rng) -> int:
    classes = np.unique(labels)
    return int(classes[rng.integers(classes.size)])


def _unpack(winners):
    boxes = [b for b, _ in winners]
    labels = np.array([b.label for b in boxes])
    counts = np.array([b.cardinality for b in boxes])
    mems = np.array([m for _, m in winners], dtype=float)
    return boxes, labels, counts, mems


def tie_break_cardinality(x: Pattern, winners: Sequence[tuple[Hyperbox, float]]) -> int:
    """Settle a tie by cardinality-weighted class probability.

    ``winners`` lists ``(box, membership)`` pairs in creation order.  A fully
    containing singleton box (membership 1, one sample) decides outright.
    """
    _, labels, counts, mems = _unpack(winners)
    return _cardinality_choice(labels, counts, mems)[0]


def tie_break_manhattan(x: Pattern, winners: Sequence[tuple[Hyperbox, float]]) -> int:
    boxes, labels, _, _ = _unpack(winners)
    V = np.stack([b.v for b in boxes])
    W = np.stack([b.w for b in boxes])
    return _manhattan_choice((x.lower + x.upper) / 2, labels, V, W)


def tie_break_random(winners: Sequence[tuple[Hyperbox, float]], rng_seed=None) -> int:
    _, labels, _, _ = _unpack(winners)
    return _random_choice(labels, _rng(rng_seed))


def _check_model(model: TrainedModel, n_features: int):
    if n_features != model.n_features:
        raise DimensionError(f"model expects {model.n_features} features, got {n_features}")
    labeled = model.labels != UNLABELED
    if not labeled.any():
        raise NoLabeledBoxesError("model has no labelled hyperboxes")
    return np.flatnonzero(labeled)


def class_scores(x: Pattern, model: TrainedModel, strategy: str = "cardinality", seed=None) -> ClassScores:
    """Per-class best membership for one (already unit-scaled) pattern."""
    idx = _check_model(model, x.n_features)
    V, W = model.V[idx], model.W[idx]
    labels, counts = model.labels[idx], model.cardinality[idx]
    mem = membership_matrix(x.lower, x.upper, V, W, model.params.gamma)[0]
    scores = {int(c): float(mem[labels == c].max()) for c in np.unique(labels)}
    b_win = float(mem.max())
    tied = np.flatnonzero(b_win - mem < TIE_EPS)
    tied_labels = labels[tied]
    if np.unique(tied_labels).size == 1:
        return ClassScores(scores, int(tied_labels[0]), b_win, False)
    probs = None
    if strategy == "cardinality":
        winner, probs = _cardinality_choice(tied_labels, counts[tied], mem[tied])
    elif strategy == "manhattan":
        winner = _manhattan_choice((x.lower + x.upper) / 2, tied_labels, V[tied], W[tied])
    elif strategy == "random":
        winner = _random_choice(tied_labels, _rng(seed))
    else:
        raise ValueError(f"unknown tie-break strategy {strategy!r}")
    return ClassScores(scores, winner, b_win, True, probs)


def predict(x: Pattern, model: TrainedModel, strategy: str = "cardinality", seed=None) -> int:
    return class_scores(x, model, strategy, seed).winner


def predict_many(lower, upper, model: TrainedModel, strategy: str = "cardinality", seed=None) -> np.ndarray:
    """Classify many unit-scaled patterns; rows of ``lower``/``upper``.

    Equivalent to calling :func:`predict` row by row, with ``random`` ties
    drawn in row order from one generator seeded by ``seed``.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown tie-break strategy {strategy!r}")
    lower = np.atleast_2d(np.asarray(lower, dtype=float))
    upper = lower if upper is None else np.atleast_2d(np.asarray(upper, dtype=float))
    idx = _check_model(model, lower.shape[1])
    V, W = model.V[idx], model.W[idx]
    labels, counts = model.labels[idx], model.cardinality[idx]
    mem = membership_matrix(lower, upper, V, W, model.params.gamma)
    first = mem.argmax(axis=1)
    b_win = mem[np.arange(mem.shape[0]), first]
    tied = (b_win[:, None] - mem) < TIE_EPS
    out = labels[first].copy()
    contested = np.flatnonzero((tied & (labels[None, :] != out[:, None])).any(axis=1))
    rng = _rng(seed) if strategy == "random" else None
    for r in contested:
        t = np.flatnonzero(tied[r])
        if strategy == "cardinality":
            out[r] = _cardinality_choice(labels[t], counts[t], mem[r, t])[0]
        elif strategy == "manhattan":
            out[r] = _manhattan_choice((lower[r] + upper[r]) / 2, labels[t], V[t], W[t])
        else:
            out[r] = _random_choice(labels[t], rng)
    return out


def score_matrix(lower, upper, model: TrainedModel) -> tuple[np.ndarray, np.ndarray]:
    """Per-class best memberships ``(n_patterns, n_classes)`` and the class ids."""
    lower = np.atleast_2d(np.asarray(lower, dtype=float))
    upper = lower if upper is None else np.atleast_2d(np.asarray(upper, dtype=float))
    idx = _check_model(model, lower.shape[1])
    labels = model.labels[idx]
    mem = membership_matrix(lower, upper, model.V[idx], model.W[idx], model.params.gamma)
    classes = np.array(sorted(model.class_catalog))
    out = np.zeros((lower.shape[0], classes.size))
    for j, c in enumerate(classes):
        cols = labels == c
        if cols.any():
            out[:, j] = mem[:, cols].max(axis=1)
    return out, classes
