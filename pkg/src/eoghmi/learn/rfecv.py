"""Recursive feature elimination driven by cross-validated tree accuracy."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidParameterError
from .tree import DecisionTreeClassifier


@dataclass
class RfecvResult:
    """Selected mask plus the accuracy trace of the elimination schedule."""

    mask: np.ndarray
    scores: dict[int, float] = field(default_factory=dict)

    @property
    def n_selected(self) -> int:
        return int(np.count_nonzero(self.mask))


def _fold_indices(n: int, folds: int, rng: np.random.Generator) -> list[np.ndarray]:
    order = rng.permutation(n)
    return [order[i::folds] for i in range(folds)]


def rfecv(X, y, folds: int = 10, seed: int = 0, step_fraction: float = 0.2,
          max_depth: int | None = None) -> RfecvResult:
    """Iteratively drop the least-important ~20% of features, tracking CV accuracy.

    At each feature count a decision tree is cross-validated; its mean fold
    accuracy is recorded and its mean fold importances rank the features for
    the next elimination. The kept count maximizes mean CV accuracy; ties go
    to the smaller feature set. Deterministic for a given seed.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    n, d = X.shape
    if n < folds:
        raise InvalidParameterError(f"need at least {folds} samples for {folds}-fold CV")
    if not 0 < step_fraction < 1:
        raise InvalidParameterError("step_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    fold_idx = _fold_indices(n, folds, rng)

    current = np.arange(d)
    scores: dict[int, float] = {}
    subsets: dict[int, np.ndarray] = {}
    while True:
        accs = np.empty(folds)
        importances = np.zeros(current.size)
        for i, val in enumerate(fold_idx):
            train = np.setdiff1d(np.arange(n), val, assume_unique=False)
            tree = DecisionTreeClassifier(max_depth=max_depth)
            tree.fit(X[np.ix_(train, current)], y[train])
            accs[i] = float(np.mean(tree.predict(X[np.ix_(val, current)]) == y[val]))
            importances += tree.feature_importances_
        importances /= folds
        scores[current.size] = float(accs.mean())
        subsets[current.size] = current.copy()
        if current.size == 1:
            break
        n_drop = max(1, int(round(step_fraction * current.size)))
        n_drop = min(n_drop, current.size - 1)
        # ascending importance; ties drop the higher original index first so
        # the schedule is reproducible
        order = np.lexsort((-current, importances))
        current = np.sort(current[order[n_drop:]])

    best_count = max(scores, key=lambda c: (scores[c], -c))
    mask = np.zeros(d, dtype=bool)
    mask[subsets[best_count]] = True
    return RfecvResult(mask=mask, scores=scores)
