"""Classifiers, feature selection, and evaluation protocol.

Everything here is implemented directly on numpy: the tree/forest family,
nearest-neighbour and shrinkage-discriminant classifiers, recursive feature
elimination, and the leave-one-session-out harness with leakage-free
per-fold normalization.
"""
from .dataset import ACTIVITIES, LabeledDataset, load_dataset_csv, save_dataset_csv
from .forest import RandomForestClassifier
from .knn import KnnClassifier
from .lda import ShrinkageLdaClassifier, ledoit_wolf_shrinkage
from .loso import DEFAULT_GRIDS, EvalReport, FoldArtifacts, grid_search, loso_evaluate
from .metrics import classification_metrics
from .models import (
    MODEL_KINDS,
    TrainedModel,
    fit_model,
    load_model,
    predict,
    predict_proba,
    save_model,
)
from .rfecv import RfecvResult, rfecv
from .tree import DecisionTreeClassifier

__all__ = [
    "ACTIVITIES",
    "LabeledDataset",
    "load_dataset_csv",
    "save_dataset_csv",
    "DecisionTreeClassifier",
    "RandomForestClassifier",
    "KnnClassifier",
    "ShrinkageLdaClassifier",
    "ledoit_wolf_shrinkage",
    "classification_metrics",
    "rfecv",
    "RfecvResult",
    "loso_evaluate",
    "grid_search",
    "DEFAULT_GRIDS",
    "EvalReport",
    "FoldArtifacts",
    "MODEL_KINDS",
    "TrainedModel",
    "fit_model",
    "predict",
    "predict_proba",
    "save_model",
    "load_model",
]
