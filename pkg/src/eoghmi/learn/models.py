"""Shared training interface: normalization + feature mask + classifier.

A TrainedModel bundles everything needed to score raw 87-dimension stacked
feature rows: the train-set normalization statistics, the boolean feature
mask from selection, the classifier kind, and the fitted classifier itself.
Persistence is versioned JSON so models survive refactors detectably.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import InvalidParameterError
from ..features import NormalizationStats, apply_normalization, fit_normalization
from .forest import RandomForestClassifier
from .knn import KnnClassifier
from .lda import ShrinkageLdaClassifier
from .tree import DecisionTreeClassifier

MODEL_FORMAT_VERSION = "eoghmi-model/1"
MODEL_KINDS = ("knn", "lda_shrinkage", "decision_tree", "random_forest")


@dataclass
class TrainedModel:
    """A fitted classifier plus the preprocessing baked in at train time."""

    kind: str
    parameters: dict
    selected_features: np.ndarray
    norm_stats: NormalizationStats
    classifier: object

    def __post_init__(self):
        self.selected_features = np.asarray(self.selected_features, dtype=bool)

    @property
    def n_features_in(self) -> int:
        return self.selected_features.size


def _build_classifier(kind: str, params: dict, seed: int):
    if kind == "knn":
        return KnnClassifier(k=int(params.get("k", 5)))
    if kind == "lda_shrinkage":
        return ShrinkageLdaClassifier(shrinkage=params.get("shrinkage", "auto"))
    if kind == "decision_tree":
        return DecisionTreeClassifier(
            max_depth=params.get("max_depth"),
            rng=np.random.default_rng(seed),
        )
    if kind == "random_forest":
        return RandomForestClassifier(
            n_estimators=int(params.get("n_estimators", 100)),
            max_depth=params.get("max_depth"),
            seed=seed,
        )
    raise InvalidParameterError(f"unknown model kind {kind!r}; expected one of {MODEL_KINDS}")


def fit_model(kind: str, X, y, params: dict | None = None, *,
              norm_stats: NormalizationStats | None = None,
              mask: np.ndarray | None = None,
              seed: int = 0) -> TrainedModel:
    """Fit a classifier of the given kind on raw feature rows.

    Normalization statistics are computed from X unless supplied (as they are
    by the leave-one-session-out harness, which fits them on the training
    fold).  The feature mask defaults to all-true.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2:
        raise InvalidParameterError("X must be 2-D (samples x features)")
    if X.shape[0] != y.shape[0]:
        raise InvalidParameterError("X and y row counts differ")
    if np.unique(y).size < 2:
        raise InvalidParameterError("need at least 2 classes to fit a classifier")
    params = dict(params or {})
    if norm_stats is None:
        norm_stats = fit_normalization(X)
    if mask is None:
        mask = np.ones(X.shape[1], dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if mask.size != X.shape[1]:
        raise InvalidParameterError("feature mask length does not match X columns")
    if not mask.any():
        raise InvalidParameterError("feature mask selects no features")

    Xn = apply_normalization(norm_stats, X)[:, mask]
    clf = _build_classifier(kind, params, seed)
    clf.fit(Xn, y)
    return TrainedModel(kind=kind, parameters=params, selected_features=mask,
                        norm_stats=norm_stats, classifier=clf)


def _prepare(model: TrainedModel, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidParameterError("X must be 2-D (samples x features)")
    if X.shape[1] != model.n_features_in:
        raise InvalidParameterError(
            f"expected {model.n_features_in} features, got {X.shape[1]}")
    return apply_normalization(model.norm_stats, X)[:, model.selected_features]


def predict(model: TrainedModel, X) -> np.ndarray:
    """Labels for raw feature rows; empty input yields an empty array."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 2 and X.shape[0] == 0:
        return np.asarray([], dtype=model.classifier.classes_.dtype)
    return model.classifier.predict(_prepare(model, X))


def predict_proba(model: TrainedModel, X) -> tuple[np.ndarray, np.ndarray]:
    """(classes, per-class probabilities) for raw feature rows."""
    return model.classifier.classes_, model.classifier.predict_proba(_prepare(model, X))


def _stats_to_dict(stats: NormalizationStats) -> dict:
    return {
        "mean": stats.mean.tolist(),
        "std": stats.std.tolist(),
        "zero_variance": stats.zero_variance.tolist(),
    }


def _stats_from_dict(d: dict) -> NormalizationStats:
    return NormalizationStats(
        mean=np.asarray(d["mean"], dtype=np.float64),
        std=np.asarray(d["std"], dtype=np.float64),
        zero_variance=np.asarray(d["zero_variance"], dtype=bool),
    )


def save_model(model: TrainedModel, path) -> None:
    payload = {
        "format": MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "parameters": model.parameters,
        "selected_features": model.selected_features.tolist(),
        "norm_stats": _stats_to_dict(model.norm_stats),
        "classifier": model.classifier.to_dict(),
    }
    Path(path).write_text(json.dumps(payload))


_CLASSIFIERS = {
    "knn": KnnClassifier,
    "lda_shrinkage": ShrinkageLdaClassifier,
    "decision_tree": DecisionTreeClassifier,
    "random_forest": RandomForestClassifier,
}


def load_model(path) -> TrainedModel:
    payload = json.loads(Path(path).read_text())
    if payload.get("format") != MODEL_FORMAT_VERSION:
        raise InvalidParameterError(
            f"unsupported model format {payload.get('format')!r}")
    kind = payload["kind"]
    if kind not in _CLASSIFIERS:
        raise InvalidParameterError(f"unknown model kind {kind!r}")
    clf = _CLASSIFIERS[kind].from_dict(payload["classifier"])
    return TrainedModel(
        kind=kind,
        parameters=payload["parameters"],
        selected_features=np.asarray(payload["selected_features"], dtype=bool),
        norm_stats=_stats_from_dict(payload["norm_stats"]),
        classifier=clf,
    )
