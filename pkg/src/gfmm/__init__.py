"""General fuzzy min-max (GFMM) classifiers trained online.

Two learners share one hyperbox model: the original online algorithm with
overlap contraction, and the improved online learner that refuses any
expansion which would overlap another class.
"""

__version__ = "0.1.0"

from .core import (
    UNLABELED,
    FeatureScaler,
    Hyperbox,
    ModelParams,
    Pattern,
    TrainedModel,
    clamp_to_unit,
    fit_scaler,
)
from .estimators import GFMMEnsembleClassifier, ImprovedOnlineGFMMClassifier, OnlineGFMMClassifier
from .iol import train_iol, would_overlap
from .membership import membership, ramp
from .onln import OverlapReport, contract, expand, expandable, overlap_test, train_online
from .prediction import ClassScores, class_scores, predict
from .refinement import EnsembleModel, predict_ensemble, prune, train_ensemble

__all__ = [
    "UNLABELED",
    "ClassScores",
    "EnsembleModel",
    "FeatureScaler",
    "GFMMEnsembleClassifier",
    "Hyperbox",
    "ImprovedOnlineGFMMClassifier",
    "ModelParams",
    "OnlineGFMMClassifier",
    "OverlapReport",
    "Pattern",
    "TrainedModel",
    "clamp_to_unit",
    "class_scores",
    "contract",
    "expand",
    "expandable",
    "fit_scaler",
    "membership",
    "overlap_test",
    "predict",
    "predict_ensemble",
    "prune",
    "ramp",
    "train_ensemble",
    "train_iol",
    "train_online",
    "would_overlap",
]
