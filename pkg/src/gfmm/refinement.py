"""Post-training model surgery: validation pruning and shuffled-order ensembles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .core import ModelParams, Pattern, TrainedModel, stack_patterns
from .iol import train_iol
from .membership import membership_matrix
from .prediction import TIE_EPS, _check_model, predict_many

DEFAULT_MEMBERS = 11


def box_win_stats(model: TrainedModel, lower, upper, labels) -> tuple[np.ndarray, np.ndarray]:
    """How many validation samples each box wins, and how many of those correctly.

    A box wins a sample when it attains the sample's top membership over all
    boxes; every tied box is charged.
    """
    mem = membership_matrix(lower, upper, model.V, model.W, model.params.gamma)
    tied = (mem.max(axis=1, keepdims=True) - mem) < TIE_EPS
    right = tied & (model.labels[None, :] == np.asarray(labels)[:, None])
    return tied.sum(axis=0), right.sum(axis=0)


def prune(model: TrainedModel, validation: Sequence[Pattern], threshold: float = 0.5) -> TrainedModel:
    """Drop boxes whose validation win-accuracy is below ``threshold``.

    Boxes that never win a validation sample are kept.  If every box would
    go, the model is returned unchanged.
    """
    if len(validation) == 0:
        raise ValueError("pruning needs a non-empty validation set")
    lo, hi, y = stack_patterns(validation)
    wins, right = box_win_stats(model, lo, hi, y)
    acc = np.divide(right, wins, out=np.ones(wins.shape), where=wins > 0)
    keep = ~((wins > 0) & (acc < threshold))
    if not keep.any():
        return model
    return model.subset(np.flatnonzero(keep))


@dataclass
class EnsembleModel:
    members: list
    seeds: list = field(default_factory=list)

    def __post_init__(self):
        if not self.members:
            raise ValueError("an ensemble needs at least one member")
        n = self.members[0].n_features
        catalog = self.members[0].class_catalog
        for m in self.members[1:]:
            if m.n_features != n or m.class_catalog != catalog:
                raise ValueError("ensemble members disagree on features or classes")
        self.seeds = [int(s) for s in self.seeds]

    @property
    def class_catalog(self):
        return self.members[0].class_catalog

    @property
    def n_features(self) -> int:
        return self.members[0].n_features

    @property
    def scaler(self):
        return self.members[0].scaler

    @property
    def class_names(self):
        return self.members[0].class_names

    def __len__(self):
        return len(self.members)

    def __eq__(self, other):
        if not isinstance(other, EnsembleModel):
            return NotImplemented
        return self.seeds == other.seeds and len(self) == len(other) and all(
            a == b for a, b in zip(self.members, other.members)
        )


def member_seeds(seed, k: int) -> list[int]:
    """``k`` shuffle seeds derived deterministically from one master seed."""
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(k)]


def train_ensemble(
    data: Sequence[Pattern],
    params: ModelParams,
    k: int = DEFAULT_MEMBERS,
    seeds: Sequence[int] | None = None,
    *,
    seed=0,
    trainer: Callable = train_iol,
    scaler=None,
) -> EnsembleModel:
    """Train ``k`` models on the same data, each presented in its own shuffled order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    seeds = member_seeds(seed, k) if seeds is None else [int(s) for s in seeds]
    if len(seeds) != k:
        raise ValueError(f"got {len(seeds)} seeds for {k} members")
    members = []
    for s in seeds:
        order = np.random.default_rng(s).permutation(len(data))
        members.append(trainer([data[i] for i in order], params, scaler=scaler))
    return EnsembleModel(members, seeds)


def _class_support(model: TrainedModel, lower, upper, classes) -> np.ndarray:
    """Per class: summed ``cardinality * membership`` over its best-matching boxes."""
    idx = _check_model(model, lower.shape[1])
    labels, counts = model.labels[idx], model.cardinality[idx]
    mem = membership_matrix(lower, upper, model.V[idx], model.W[idx], model.params.gamma)
    out = np.zeros((lower.shape[0], len(classes)))
    for j, c in enumerate(classes):
        cols = np.flatnonzero(labels == c)
        if cols.size == 0:
            continue
        m = mem[:, cols]
        best = m.max(axis=1, keepdims=True)
        out[:, j] = np.where(best - m < TIE_EPS, m * counts[cols], 0.0).sum(axis=1)
    return out


def _member_rng_seed(seed, member_seed):
    return None if seed is None else [int(seed), int(member_seed)]


def predict_ensemble_many(lower, upper, ens: EnsembleModel, strategy: str = "cardinality", seed=None) -> np.ndarray:
    """Majority vote of the members on each row of ``lower``/``upper``.

    Vote ties go to the tied class with the largest summed support (see
    :func:`_class_support`) across members, then to the smallest class id.
    """
    lower = np.atleast_2d(np.asarray(lower, dtype=float))
    upper = lower if upper is None else np.atleast_2d(np.asarray(upper, dtype=float))
    classes = sorted(ens.class_catalog)
    col = {c: j for j, c in enumerate(classes)}
    votes = np.zeros((lower.shape[0], len(classes)), dtype=np.int64)
    seeds = ens.seeds if len(ens.seeds) == len(ens) else [0] * len(ens)
    for member, ms in zip(ens.members, seeds):
        pred = predict_many(lower, upper, member, strategy, _member_rng_seed(seed, ms))
        votes[np.arange(pred.size), [col[int(p)] for p in pred]] += 1
    top = votes.max(axis=1, keepdims=True)
    tied = votes == top
    out = np.array(classes)[votes.argmax(axis=1)]
    contested = np.flatnonzero(tied.sum(axis=1) > 1)
    if contested.size:
        support = [_class_support(m, lower[contested], upper[contested], classes) for m in ens.members]
        for r, row in enumerate(contested):
            totals = {
                classes[j]: math.fsum(s[r, j] for s in support)
                for j in np.flatnonzero(tied[row])
            }
            best = max(totals.values())
            out[row] = min(c for c, t in totals.items() if best - t <= TIE_EPS * max(1.0, best))
    return out


def predict_ensemble(x: Pattern, ens: EnsembleModel, strategy: str = "cardinality", seed=None) -> int:
    return int(predict_ensemble_many(x.lower[None], x.upper[None], ens, strategy, seed)[0])
