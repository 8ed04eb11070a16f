"""Sink-side detectors: classic LSB tests and the FLD ensemble."""

from .classic import close_color_pairs_stat, close_pair_ratio, lsb_enhance, lsb_plane_entropy, rqp_test
from .ensemble import (
    BaseLearner,
    DegenerateData,
    EnsembleModel,
    fld_train,
    oob_curve,
    oob_error,
    paired_error,
    train_ensemble,
)
from .features import FEATURE_DIM, extract_features, feature_names
from .roc import RocCurve, roc_curve

__all__ = [
    "BaseLearner",
    "DegenerateData",
    "EnsembleModel",
    "FEATURE_DIM",
    "RocCurve",
    "close_color_pairs_stat",
    "close_pair_ratio",
    "extract_features",
    "feature_names",
    "fld_train",
    "lsb_enhance",
    "lsb_plane_entropy",
    "oob_curve",
    "oob_error",
    "paired_error",
    "roc_curve",
    "rqp_test",
    "train_ensemble",
]
