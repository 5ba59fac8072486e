"""scikit-learn compatible wrappers around the GFMM learners."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.multiclass import check_classification_targets
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .core import BoxStore, FeatureScaler, ModelParams, TrainedModel, as_patterns, fit_scaler
from .iol import iol_step, train_iol
from .onln import online_step
from .prediction import STRATEGIES, predict_many, score_matrix
from .refinement import predict_ensemble_many, prune, train_ensemble


class _GFMMBase(ClassifierMixin, BaseEstimator):
    _step = None

    def __init__(self, theta=0.1, gamma=1.0, tie_break="cardinality", normalize=True, random_state=None):
        self.theta = theta
        self.gamma = gamma
        self.tie_break = tie_break
        self.normalize = normalize
        self.random_state = random_state

    def _validate(self, X, X_upper):
        X = check_array(X, dtype=float)
        Xu = X if X_upper is None else check_array(X_upper, dtype=float)
        if Xu.shape != X.shape:
            raise ValueError("X_upper must have the same shape as X")
        if np.any(Xu < X):
            raise ValueError("X_upper must be >= X elementwise")
        return X, Xu

    def _unit(self, X, Xu):
        s = self.scaler_
        return np.clip(s.transform(X), 0.0, 1.0), np.clip(s.transform(Xu), 0.0, 1.0)

    def _encode(self, y):
        pos = np.searchsorted(self.classes_, y)
        if np.any(pos >= self.classes_.size) or np.any(self.classes_[np.minimum(pos, self.classes_.size - 1)] != y):
            raise ValueError("y contains labels not seen in `classes`")
        return pos + 1

    def _start(self, X, Xu, classes):
        self.classes_ = np.asarray(classes)
        self.n_features_in_ = X.shape[1]
        if self.normalize:
            self.scaler_ = fit_scaler(np.vstack([X, Xu]))
        else:
            if X.min() < 0 or Xu.max() > 1:
                raise ValueError("with normalize=False inputs must lie in [0, 1]")
            self.scaler_ = FeatureScaler.identity(X.shape[1])
        self.params_ = ModelParams.create(self.theta, X.shape[1], self.gamma)
        self._store = BoxStore(X.shape[1])

    def _learn(self, X, Xu, y):
        lo, hi = self._unit(X, Xu)
        ids = self._encode(y)
        for t in range(lo.shape[0]):
            type(self)._step(self._store, lo[t], hi[t], int(ids[t]), self.params_)
        self._set_model(
            TrainedModel.from_store(
                self._store,
                self.params_,
                self.scaler_,
                range(1, self.classes_.size + 1),
                {i + 1: str(c) for i, c in enumerate(self.classes_)},
            )
        )

    def _set_model(self, model):
        self.model_ = model
        self.n_boxes_ = model.n_boxes

    def fit(self, X, y, X_upper=None):
        """Single pass over the rows of ``X`` in the given order.

        ``X_upper`` turns rows into interval patterns ``[X, X_upper]``.
        """
        X, y = check_X_y(X, y, dtype=float)
        check_classification_targets(y)
        X, Xu = self._validate(X, X_upper)
        self._start(X, Xu, np.unique(y))
        self._learn(X, Xu, y)
        return self

    def partial_fit(self, X, y, classes=None, X_upper=None):
        """Continue training on more rows.

        The feature scaling is fixed by the first call; later values outside
        that range are clipped into the unit cube.
        """
        X, y = check_X_y(X, y, dtype=float)
        X, Xu = self._validate(X, X_upper)
        if not hasattr(self, "_store"):
            if classes is None:
                raise ValueError("classes must be passed on the first call to partial_fit")
            self._start(X, Xu, np.unique(classes))
        self._learn(X, Xu, y)
        return self

    def predict(self, X, X_upper=None):
        check_is_fitted(self, "model_")
        if self.tie_break not in STRATEGIES:
            raise ValueError(f"tie_break must be one of {STRATEGIES}")
        X, Xu = self._validate(X, X_upper)
        lo, hi = self._unit(X, Xu)
        ids = predict_many(lo, hi, self.model_, self.tie_break, self.random_state)
        return self.classes_[ids - 1]

    def decision_function(self, X, X_upper=None):
        """Best membership of each row in each class, columns ordered as ``classes_``."""
        check_is_fitted(self, "model_")
        X, Xu = self._validate(X, X_upper)
        lo, hi = self._unit(X, Xu)
        scores, ids = score_matrix(lo, hi, self.model_)
        out = np.zeros((X.shape[0], self.classes_.size))
        out[:, ids - 1] = scores
        return out

    def prune(self, X, y, threshold=0.5, X_upper=None):
        """Remove boxes with validation win-accuracy below ``threshold``."""
        check_is_fitted(self, "model_")
        X, Xu = self._validate(X, X_upper)
        lo, hi = self._unit(X, Xu)
        self._set_model(prune(self.model_, as_patterns(lo, hi, self._encode(np.asarray(y))), threshold))
        return self


class ImprovedOnlineGFMMClassifier(_GFMMBase):
    """GFMM trained by overlap-preventing online learning (IOL-GFMM).

    Parameters
    ----------
    theta : float
        Maximum hyperbox edge length in the unit cube, in (0, 1].
    gamma : float or array-like
        Sensitivity of the membership function, scalar or one per feature.
    tie_break : {"cardinality", "manhattan", "random"}
        How equal top memberships of different classes are settled.
    normalize : bool
        Min-max scale features on ``fit``; otherwise inputs must be in [0, 1].
    random_state : int or None
        Seed for the ``random`` tie-break.
    """

    _step = staticmethod(iol_step)


class OnlineGFMMClassifier(_GFMMBase):
    """GFMM trained by the original online algorithm with contraction.

    Same parameters as :class:`ImprovedOnlineGFMMClassifier`; ties default
    to a seeded random choice among the tied classes.
    """

    _step = staticmethod(online_step)

    def __init__(self, theta=0.1, gamma=1.0, tie_break="random", normalize=True, random_state=None):
        super().__init__(theta, gamma, tie_break, normalize, random_state)


class GFMMEnsembleClassifier(ClassifierMixin, BaseEstimator):
    """Majority vote over IOL-GFMM models trained on shuffled presentation orders."""

    def __init__(self, n_estimators=11, theta=0.1, gamma=1.0, normalize=True, random_state=0):
        self.n_estimators = n_estimators
        self.theta = theta
        self.gamma = gamma
        self.normalize = normalize
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=float)
        check_classification_targets(y)
        self.classes_ = np.unique(y)
        self.n_features_in_ = X.shape[1]
        scaler = fit_scaler(X) if self.normalize else FeatureScaler.identity(X.shape[1])
        params = ModelParams.create(self.theta, X.shape[1], self.gamma)
        ids = np.searchsorted(self.classes_, y) + 1
        patterns = as_patterns(np.clip(scaler.transform(X), 0.0, 1.0), None, ids)
        self.ensemble_ = train_ensemble(
            patterns, params, self.n_estimators, seed=self.random_state, trainer=train_iol, scaler=scaler
        )
        return self

    def predict(self, X):
        check_is_fitted(self, "ensemble_")
        X = check_array(X, dtype=float)
        lo = np.clip(self.ensemble_.scaler.transform(X), 0.0, 1.0)
        return self.classes_[predict_ensemble_many(lo, lo, self.ensemble_) - 1]
