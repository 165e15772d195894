"""Leave-one-session-out evaluation with strictly train-side fitting.

Each held-out session defines one fold.  Everything learned — normalization
statistics, the recursive-elimination feature mask, and the grid-searched
hyperparameters — is computed from the training sessions alone and recorded
in FoldArtifacts so an audit can recompute it bit-for-bit from the training
rows.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidParameterError
from ..features import apply_normalization, fit_normalization
from .dataset import ACTIVITIES, LabeledDataset
from .metrics import classification_metrics
from .models import TrainedModel, _build_classifier, fit_model, predict
from .rfecv import rfecv

# Fixed hyperparameter grids searched per fold (inner 5-fold CV).
DEFAULT_GRIDS: dict[str, list[dict]] = {
    "knn": [{"k": k} for k in (1, 3, 5, 7, 11)],
    "lda_shrinkage": [{"shrinkage": s} for s in (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, "auto")],
    "decision_tree": [{"max_depth": d} for d in (None, 10)],
    "random_forest": [
        {"n_estimators": n, "max_depth": d} for n in (100, 300) for d in (None, 10)
    ],
}

# Stage tags feeding the per-fold seed derivation.
_STAGE_RFECV, _STAGE_GRID, _STAGE_FIT = 0, 1, 2


def _stage_seed(seed: int, fold_index: int, stage: int) -> int:
    """Deterministic per-fold, per-stage seed (folds stay parallelizable)."""
    return int(np.random.SeedSequence([seed, fold_index, stage]).generate_state(1)[0])


def _stratified_folds(y: np.ndarray, folds: int, rng: np.random.Generator) -> list[np.ndarray]:
    """Deal each class's shuffled indices round-robin across folds."""
    assign: list[list[int]] = [[] for _ in range(folds)]
    offset = 0
    for lab in sorted(set(y.tolist())):
        idx = np.flatnonzero(y == lab)
        idx = idx[rng.permutation(idx.size)]
        for j, i in enumerate(idx):
            assign[(offset + j) % folds].append(int(i))
        offset += idx.size
    return [np.sort(np.asarray(a, dtype=np.intp)) for a in assign]


def grid_search(kind: str, X, y, param_grid: list[dict], folds: int = 5,
                seed: int = 0, classifier_factory=None) -> tuple[dict, list[tuple[dict, float]]]:
    """Pick hyperparameters by mean stratified-CV accuracy on (X, y).

    Returns (best_params, scores-in-grid-order).  Ties keep the earliest grid
    entry, so the grid ordering is part of the contract.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=object)
    if not param_grid:
        raise InvalidParameterError("empty parameter grid")
    rng = np.random.default_rng(seed)
    eff_folds = max(2, min(folds, X.shape[0]))
    fold_idx = _stratified_folds(y, eff_folds, rng)
    all_idx = np.arange(X.shape[0])

    scores: list[tuple[dict, float]] = []
    best: tuple[dict, float] | None = None
    for params in param_grid:
        accs = []
        for val in fold_idx:
            train = np.setdiff1d(all_idx, val)
            if val.size == 0 or train.size == 0:
                continue
            if np.unique(y[train]).size < 2:
                continue
            if classifier_factory is not None:
                clf = classifier_factory(params, seed)
            else:
                clf = _build_classifier(kind, params, seed)
            clf.fit(X[train], y[train])
            accs.append(float(np.mean(clf.predict(X[val]) == y[val])))
        score = float(np.mean(accs)) if accs else 0.0
        scores.append((dict(params), score))
        if best is None or score > best[1]:
            best = (dict(params), score)
    return best[0], scores


@dataclass
class FoldArtifacts:
    """Everything a fold learned from its training sessions."""

    session: str
    norm_stats: object
    mask: np.ndarray
    rfecv_scores: dict[int, float]
    rfecv_seed: int
    grid_scores: list[tuple[dict, float]]
    grid_seed: int
    fit_seed: int
    best_params: dict
    model: TrainedModel
    metrics: dict


@dataclass
class EvalReport:
    """Aggregate of a leave-one-session-out run."""

    per_fold: list[dict]
    mean_accuracy: float
    accuracy_std: float
    confusion: np.ndarray
    labels: list[str]
    folds: list[FoldArtifacts] = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "per_fold": self.per_fold,
            "mean_accuracy": self.mean_accuracy,
            "accuracy_std": self.accuracy_std,
            "labels": list(self.labels),
            "confusion": self.confusion.tolist(),
        }


def loso_evaluate(dataset: LabeledDataset, kind: str, param_grid: list[dict] | None = None,
                  seed: int = 0, *, select_features: bool = True, rfecv_folds: int = 10,
                  inner_folds: int = 5, classifier_factory=None) -> EvalReport:
    """Evaluate a classifier kind with one fold per recording session.

    Per fold: fit normalization on the training sessions, run recursive
    feature elimination on the normalized training rows, grid-search
    hyperparameters with inner stratified CV, fit on the full training side,
    and score the held-out session.  ``classifier_factory(params, seed)`` may
    replace the built-in classifier kinds (used by oracle tests).
    """
    sessions = dataset.sessions
    if len(sessions) < 2:
        raise InvalidParameterError("leave-one-session-out needs at least 2 sessions")
    if param_grid is None:
        if classifier_factory is not None:
            param_grid = [{}]
        elif kind in DEFAULT_GRIDS:
            param_grid = DEFAULT_GRIDS[kind]
        else:
            raise InvalidParameterError(f"no default grid for model kind {kind!r}")

    labels = list(ACTIVITIES)
    per_fold: list[dict] = []
    folds: list[FoldArtifacts] = []
    pooled = np.zeros((len(labels), len(labels)), dtype=np.int64)

    for fold_index, sess in enumerate(sessions):
        test_rows = dataset.session == sess
        train = dataset.subset(~test_rows)
        test = dataset.subset(test_rows)
        if np.unique(train.y).size < 2:
            raise InvalidParameterError(f"training side of fold {sess!r} has a single class")

        norm_stats = fit_normalization(train.X)
        Xtr = apply_normalization(norm_stats, train.X)

        rfecv_seed = _stage_seed(seed, fold_index, _STAGE_RFECV)
        if select_features:
            selection = rfecv(Xtr, train.y, folds=min(rfecv_folds, train.n_samples),
                              seed=rfecv_seed)
            mask, rfecv_scores = selection.mask, selection.scores
        else:
            mask = np.ones(train.X.shape[1], dtype=bool)
            rfecv_scores = {}

        grid_seed = _stage_seed(seed, fold_index, _STAGE_GRID)
        best_params, grid_scores = grid_search(
            kind, Xtr[:, mask], train.y, param_grid, folds=inner_folds,
            seed=grid_seed, classifier_factory=classifier_factory,
        )

        fit_seed = _stage_seed(seed, fold_index, _STAGE_FIT)
        if classifier_factory is not None:
            clf = classifier_factory(best_params, fit_seed)
            clf.fit(Xtr[:, mask], train.y)
            model = TrainedModel(kind=kind, parameters=dict(best_params),
                                 selected_features=mask, norm_stats=norm_stats,
                                 classifier=clf)
        else:
            model = fit_model(kind, train.X, train.y, best_params,
                              norm_stats=norm_stats, mask=mask, seed=fit_seed)

        y_pred = predict(model, test.X)
        fold_metrics = classification_metrics(test.y, y_pred, labels=labels)
        pooled += fold_metrics["confusion_counts"]
        per_fold.append({
            "session": sess,
            "accuracy": fold_metrics["accuracy"],
            "precision": fold_metrics["precision"],
            "recall": fold_metrics["recall"],
            "f1": fold_metrics["f1"],
        })
        folds.append(FoldArtifacts(
            session=sess, norm_stats=norm_stats, mask=mask,
            rfecv_scores=rfecv_scores, rfecv_seed=rfecv_seed,
            grid_scores=grid_scores, grid_seed=grid_seed, fit_seed=fit_seed,
            best_params=dict(best_params), model=model, metrics=fold_metrics,
        ))

    accs = np.asarray([f["accuracy"] for f in per_fold])
    true_totals = pooled.sum(axis=1)
    confusion = np.zeros_like(pooled, dtype=np.float64)
    nonzero = true_totals > 0
    confusion[nonzero] = pooled[nonzero] / true_totals[nonzero, None]
    return EvalReport(
        per_fold=per_fold,
        mean_accuracy=float(accs.mean()),
        accuracy_std=float(accs.std(ddof=1)) if accs.size > 1 else 0.0,
        confusion=confusion,
        labels=labels,
        folds=folds,
    )
