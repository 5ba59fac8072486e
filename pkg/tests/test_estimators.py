"""The scikit-learn style wrappers."""

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.model_selection import cross_val_score

from gfmm import GFMMEnsembleClassifier, ImprovedOnlineGFMMClassifier, OnlineGFMMClassifier


@pytest.fixture
def blobs(rng):
    y = np.repeat(np.array(["a", "b"]), 60)
    X = rng.normal(size=(120, 3)) + np.where(y[:, None] == "a", 0.0, 3.0)
    return X, y


@pytest.mark.parametrize("cls", [ImprovedOnlineGFMMClassifier, OnlineGFMMClassifier, GFMMEnsembleClassifier])
def test_params_and_clone(cls):
    est = cls(theta=0.4)
    assert est.get_params()["theta"] == 0.4
    twin = clone(est)
    assert twin.get_params() == est.get_params() and twin is not est


@pytest.mark.parametrize("cls", [ImprovedOnlineGFMMClassifier, OnlineGFMMClassifier, GFMMEnsembleClassifier])
def test_fit_predict(cls, blobs):
    X, y = blobs
    est = cls(theta=0.3).fit(X, y)
    assert set(est.predict(X)) <= {"a", "b"}
    assert est.score(X, y) > 0.9


def test_cross_validation_works(blobs):
    X, y = blobs
    scores = cross_val_score(ImprovedOnlineGFMMClassifier(theta=0.3), X, y, cv=3)
    assert scores.mean() > 0.85


def test_partial_fit_matches_fit(blobs):
    X, y = blobs
    whole = ImprovedOnlineGFMMClassifier(theta=0.3).fit(X, y)
    parts = ImprovedOnlineGFMMClassifier(theta=0.3)
    parts.partial_fit(X, y, classes=["a", "b"])
    assert parts.model_ == whole.model_
    rest = ImprovedOnlineGFMMClassifier(theta=0.3)
    rest.partial_fit(X[:50], y[:50], classes=["a", "b"])
    rest.partial_fit(X[50:], y[50:])
    assert rest.model_.cardinality.sum() == 120


def test_partial_fit_needs_classes(blobs):
    X, y = blobs
    with pytest.raises(ValueError):
        ImprovedOnlineGFMMClassifier().partial_fit(X, y)


def test_decision_function_and_prune(blobs):
    X, y = blobs
    est = ImprovedOnlineGFMMClassifier(theta=0.3).fit(X, y)
    d = est.decision_function(X)
    assert d.shape == (120, 2) and d.max() <= 1.0
    before = est.n_boxes_
    est.prune(X[::2], y[::2])
    assert est.n_boxes_ <= before


def test_interval_inputs(blobs):
    X, y = blobs
    est = ImprovedOnlineGFMMClassifier(theta=0.3).fit(X, y, X_upper=X + 0.1)
    assert est.predict(X, X_upper=X + 0.1).shape == (120,)
    with pytest.raises(ValueError):
        est.predict(X, X_upper=X - 1)


def test_normalize_false_requires_unit_inputs(blobs):
    X, y = blobs
    with pytest.raises(ValueError):
        ImprovedOnlineGFMMClassifier(normalize=False).fit(X, y)
