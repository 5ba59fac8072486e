"""Data model shared by the trainers, the classifier and the I/O layer.

Patterns and hyperboxes live in the unit hypercube.  A point input is a
pattern whose lower and upper bounds coincide.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

#: Class id of unlabelled patterns and hyperboxes.  Real classes are >= 1.
UNLABELED = 0


class DimensionError(ValueError):
    """Raised when vectors that must share a dimensionality do not."""


@dataclass(frozen=True, eq=False)
class Pattern:
    lower: np.ndarray
    upper: np.ndarray
    label: int = UNLABELED

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float).reshape(-1)
        hi = np.asarray(self.upper, dtype=float).reshape(-1)
        if lo.shape != hi.shape or lo.size == 0:
            raise DimensionError(
                f"lower/upper must be non-empty and equal length, got {lo.size} and {hi.size}"
            )
        if np.any(lo > hi):
            raise ValueError("pattern lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "label", int(self.label))

    @classmethod
    def point(cls, x, label: int = UNLABELED) -> "Pattern":
        x = np.asarray(x, dtype=float)
        return cls(x, x.copy(), label)

    @property
    def n_features(self) -> int:
        return self.lower.size

    def __eq__(self, other):
        if not isinstance(other, Pattern):
            return NotImplemented
        return (
            self.label == other.label
            and np.array_equal(self.lower, other.lower)
            and np.array_equal(self.upper, other.upper)
        )

    def __repr__(self):
        return f"Pattern(lower={self.lower.tolist()}, upper={self.upper.tolist()}, label={self.label})"


@dataclass(eq=False)
class Hyperbox:
    """Axis-aligned box ``[v, w]`` with a class label and a sample count."""

    v: np.ndarray
    w: np.ndarray
    label: int = UNLABELED
    cardinality: int = 1

    def __post_init__(self):
        self.v = np.array(self.v, dtype=float).reshape(-1)
        self.w = np.array(self.w, dtype=float).reshape(-1)
        if self.v.shape != self.w.shape:
            raise DimensionError("min and max points differ in length")
        if np.any(self.v > self.w):
            raise ValueError("hyperbox min point exceeds max point")
        if self.cardinality < 1:
            raise ValueError("cardinality must be >= 1")
        self.label = int(self.label)
        self.cardinality = int(self.cardinality)

    @classmethod
    def from_pattern(cls, p: Pattern) -> "Hyperbox":
        return cls(p.lower.copy(), p.upper.copy(), p.label, 1)

    @property
    def n_features(self) -> int:
        return self.v.size

    def copy(self) -> "Hyperbox":
        return Hyperbox(self.v.copy(), self.w.copy(), self.label, self.cardinality)

    def __eq__(self, other):
        if not isinstance(other, Hyperbox):
            return NotImplemented
        return (
            self.label == other.label
            and self.cardinality == other.cardinality
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.w, other.w)
        )

    def __repr__(self):
        return (
            f"Hyperbox(v={self.v.tolist()}, w={self.w.tolist()}, "
            f"label={self.label}, cardinality={self.cardinality})"
        )


@dataclass(frozen=True, eq=False)
class ModelParams:
    """Maximum hyperbox size ``theta`` and per-dimension sensitivity ``gamma``."""

    theta: float
    gamma: np.ndarray

    def __post_init__(self):
        theta = float(self.theta)
        if not 0.0 < theta <= 1.0:
            raise ValueError(f"theta must lie in (0, 1], got {theta}")
        gamma = np.asarray(self.gamma, dtype=float).reshape(-1)
        if gamma.size == 0 or np.any(gamma <= 0):
            raise ValueError("gamma entries must be positive")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "gamma", gamma)

    @classmethod
    def create(cls, theta: float, n_features: int, gamma: float | Sequence[float] = 1.0) -> "ModelParams":
        g = np.asarray(gamma, dtype=float).reshape(-1)
        if g.size == 1:
            g = np.full(n_features, g[0])
        elif g.size != n_features:
            raise DimensionError(f"gamma has {g.size} entries for {n_features} features")
        return cls(theta, g)

    def __eq__(self, other):
        if not isinstance(other, ModelParams):
            return NotImplemented
        return self.theta == other.theta and np.array_equal(self.gamma, other.gamma)


@dataclass(eq=False)
class FeatureScaler:
    """Per-feature min-max scaling into ``[0, 1]``."""

    data_min: np.ndarray
    data_max: np.ndarray

    def __post_init__(self):
        self.data_min = np.asarray(self.data_min, dtype=float).reshape(-1)
        self.data_max = np.asarray(self.data_max, dtype=float).reshape(-1)
        if self.data_min.shape != self.data_max.shape:
            raise DimensionError("scaler min/max length mismatch")

    @classmethod
    def identity(cls, n_features: int) -> "FeatureScaler":
        return cls(np.zeros(n_features), np.ones(n_features))

    @property
    def n_features(self) -> int:
        return self.data_min.size

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.n_features:
            raise DimensionError(f"expected {self.n_features} features, got {X.shape[-1]}")
        span = self.data_max - self.data_min
        const = span == 0
        out = (X - self.data_min) / np.where(const, 1.0, span)
        return np.where(const, 0.5, out)

    def inverse_transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        span = self.data_max - self.data_min
        const = span == 0
        return np.where(const, self.data_min, X * span + self.data_min)

    def __eq__(self, other):
        if not isinstance(other, FeatureScaler):
            return NotImplemented
        return np.array_equal(self.data_min, other.data_min) and np.array_equal(
            self.data_max, other.data_max
        )


def fit_scaler(raw_rows) -> FeatureScaler:
    """Record the per-feature minimum and maximum of ``raw_rows``."""
    rows = list(raw_rows)
    if not rows:
        raise ValueError("cannot fit a scaler on empty input")
    if len({len(r) for r in rows}) != 1:
        raise DimensionError("rows have inconsistent lengths")
    X = np.asarray(rows, dtype=float)
    if X.shape[1] == 0:
        raise ValueError("rows have no features")
    return FeatureScaler(X.min(axis=0), X.max(axis=0))


def clamp_to_unit(p: Pattern) -> Pattern:
    """Clip a pattern into the unit cube."""
    lo = np.clip(p.lower, 0.0, 1.0)
    hi = np.clip(p.upper, 0.0, 1.0)
    return Pattern(lo, np.maximum(lo, hi), p.label)


class BoxStore:
    """Growable column-stacked storage of hyperboxes, in creation order.

    ``V`` and ``W`` are views of the live rows; trainers mutate them in place.
    """

    def __init__(self, n_features: int, capacity: int = 64):
        self.n_features = n_features
        self._V = np.empty((capacity, n_features))
        self._W = np.empty((capacity, n_features))
        self._labels = np.empty(capacity, dtype=np.int64)
        self._counts = np.empty(capacity, dtype=np.int64)
        self.size = 0

    def _grow(self):
        cap = max(2 * self._V.shape[0], 1)
        for name in ("_V", "_W"):
            old = getattr(self, name)
            new = np.empty((cap, self.n_features))
            new[: self.size] = old[: self.size]
            setattr(self, name, new)
        for name in ("_labels", "_counts"):
            old = getattr(self, name)
            new = np.empty(cap, dtype=np.int64)
            new[: self.size] = old[: self.size]
            setattr(self, name, new)

    def append(self, v, w, label: int, count: int = 1) -> int:
        if self.size == self._V.shape[0]:
            self._grow()
        i = self.size
        self._V[i] = v
        self._W[i] = w
        self._labels[i] = label
        self._counts[i] = count
        self.size += 1
        return i

    @property
    def V(self) -> np.ndarray:
        return self._V[: self.size]

    @property
    def W(self) -> np.ndarray:
        return self._W[: self.size]

    @property
    def labels(self) -> np.ndarray:
        return self._labels[: self.size]

    @property
    def counts(self) -> np.ndarray:
        return self._counts[: self.size]

    def __len__(self):
        return self.size


@dataclass(eq=False)
class TrainedModel:
    """Hyperboxes in creation order plus everything needed to classify raw rows.

    Boxes are held column-stacked (``V``, ``W``, ``labels``, ``cardinality``);
    :attr:`boxes` materialises them as :class:`Hyperbox` objects.
    """

    V: np.ndarray
    W: np.ndarray
    labels: np.ndarray
    cardinality: np.ndarray
    params: ModelParams
    scaler: FeatureScaler
    class_catalog: frozenset = field(default_factory=frozenset)
    class_names: dict = field(default_factory=dict)

    def __post_init__(self):
        self.V = np.array(self.V, dtype=float, ndmin=2)
        self.W = np.array(self.W, dtype=float, ndmin=2)
        self.labels = np.array(self.labels, dtype=np.int64).reshape(-1)
        self.cardinality = np.array(self.cardinality, dtype=np.int64).reshape(-1)
        m = self.labels.size
        if self.V.shape != self.W.shape or self.V.shape[0] != m or self.cardinality.size != m:
            raise DimensionError("inconsistent hyperbox arrays")
        if not self.class_catalog:
            self.class_catalog = frozenset(int(c) for c in self.labels if c != UNLABELED)
        else:
            self.class_catalog = frozenset(int(c) for c in self.class_catalog)
        stray = {int(c) for c in self.labels if c != UNLABELED} - self.class_catalog
        if stray:
            raise ValueError(f"box labels {sorted(stray)} missing from class catalog")
        for a in (self.V, self.W, self.labels, self.cardinality):
            a.setflags(write=False)

    @classmethod
    def from_store(cls, store: BoxStore, params: ModelParams, scaler=None, class_catalog=(), class_names=None):
        if scaler is None:
            scaler = FeatureScaler.identity(store.n_features)
        return cls(
            store.V.copy(),
            store.W.copy(),
            store.labels.copy(),
            store.counts.copy(),
            params,
            scaler,
            frozenset(class_catalog),
            dict(class_names or {}),
        )

    @classmethod
    def from_boxes(cls, boxes: Iterable[Hyperbox], params: ModelParams, scaler=None, class_catalog=(), class_names=None):
        boxes = list(boxes)
        n = params.gamma.size
        if boxes:
            V = np.stack([b.v for b in boxes])
            W = np.stack([b.w for b in boxes])
        else:
            V = W = np.empty((0, n))
        return cls(
            V,
            W,
            [b.label for b in boxes],
            [b.cardinality for b in boxes],
            params,
            scaler if scaler is not None else FeatureScaler.identity(n),
            frozenset(class_catalog),
            dict(class_names or {}),
        )

    @property
    def n_boxes(self) -> int:
        return self.labels.size

    @property
    def n_features(self) -> int:
        return self.V.shape[1]

    @property
    def boxes(self) -> list[Hyperbox]:
        return [
            Hyperbox(self.V[i], self.W[i], int(self.labels[i]), int(self.cardinality[i]))
            for i in range(self.n_boxes)
        ]

    def subset(self, keep) -> "TrainedModel":
        """Model restricted to the boxes selected by ``keep`` (order preserved)."""
        keep = np.asarray(keep)
        return TrainedModel(
            self.V[keep],
            self.W[keep],
            self.labels[keep],
            self.cardinality[keep],
            self.params,
            self.scaler,
            self.class_catalog,
            dict(self.class_names),
        )

    def scale(self, X) -> np.ndarray:
        """Scale raw rows into the unit cube, clamping out-of-range values."""
        return np.clip(self.scaler.transform(X), 0.0, 1.0)

    def __eq__(self, other):
        if not isinstance(other, TrainedModel):
            return NotImplemented
        return (
            np.array_equal(self.V, other.V)
            and np.array_equal(self.W, other.W)
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.cardinality, other.cardinality)
            and self.params == other.params
            and self.scaler == other.scaler
            and self.class_catalog == other.class_catalog
            and self.class_names == other.class_names
        )


def as_patterns(X_lower, X_upper=None, labels=None) -> list[Pattern]:
    """Build patterns from row arrays; ``X_upper`` defaults to ``X_lower``."""
    lo = np.asarray(X_lower, dtype=float)
    hi = lo if X_upper is None else np.asarray(X_upper, dtype=float)
    if lo.shape != hi.shape:
        raise DimensionError("lower and upper arrays differ in shape")
    if labels is None:
        labels = np.full(lo.shape[0], UNLABELED)
    return [Pattern(lo[i], hi[i], int(labels[i])) for i in range(lo.shape[0])]


def stack_patterns(data: Sequence[Pattern]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Column-stack patterns into ``(lower, upper, labels)`` arrays."""
    if len(data) == 0:
        raise ValueError("no patterns given")
    n = data[0].n_features
    for p in data:
        if p.n_features != n:
            raise DimensionError(f"pattern has {p.n_features} features, expected {n}")
    lo = np.stack([p.lower for p in data])
    hi = np.stack([p.upper for p in data])
    y = np.array([p.label for p in data], dtype=np.int64)
    return lo, hi, y
