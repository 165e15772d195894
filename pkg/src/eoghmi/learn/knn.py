"""K-nearest-neighbour classification with order-independent tie handling."""
from __future__ import annotations

import numpy as np

from ..errors import InvalidParameterError


class KnnClassifier:
    """Majority vote over the k nearest training points (Euclidean).

    All points tied with the k-th smallest distance are included, so the
    prediction cannot depend on the storage order of the training rows.
    Vote ties break by the smallest cumulative member distance, then by the
    lowest class index.
    """

    def __init__(self, k=5):
        if k < 1:
            raise InvalidParameterError("k must be >= 1")
        self.k = k
        self._X: np.ndarray | None = None
        self._y_enc: np.ndarray | None = None
        self.classes_: np.ndarray | None = None

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        if X.shape[0] != y.shape[0]:
            raise InvalidParameterError("X and y row counts differ")
        if X.shape[0] < self.k:
            raise InvalidParameterError(f"need at least k={self.k} training rows")
        self.classes_, self._y_enc = np.unique(y, return_inverse=True)
        self._X = X
        return self

    def _vote(self, dists: np.ndarray) -> tuple[int, np.ndarray]:
        kth = np.partition(dists, self.k - 1)[self.k - 1]
        member = dists <= kth
        labels = self._y_enc[member]
        n_classes = self.classes_.size
        counts = np.bincount(labels, minlength=n_classes).astype(np.float64)
        cum_dist = np.zeros(n_classes)
        np.add.at(cum_dist, labels, dists[member])
        best = np.flatnonzero(counts == counts.max())
        if best.size > 1:
            tied_dists = cum_dist[best]
            best = best[tied_dists == tied_dists.min()]
        winner = int(best[0])
        return winner, counts / counts.sum()

    def predict_proba(self, X) -> np.ndarray:
        if self._X is None:
            raise InvalidParameterError("classifier not fitted")
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        out = np.empty((X.shape[0], self.classes_.size))
        for i, x in enumerate(X):
            dists = np.sqrt(np.sum((self._X - x) ** 2, axis=1))
            _, probs = self._vote(dists)
            out[i] = probs
        return out

    def predict(self, X) -> np.ndarray:
        if self._X is None:
            raise InvalidParameterError("classifier not fitted")
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        winners = np.empty(X.shape[0], dtype=np.intp)
        for i, x in enumerate(X):
            dists = np.sqrt(np.sum((self._X - x) ** 2, axis=1))
            winners[i], _ = self._vote(dists)
        return self.classes_[winners]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "classes": self.classes_.tolist(),
            "X": self._X.tolist(),
            "y_enc": self._y_enc.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "KnnClassifier":
        obj = cls(k=d["k"])
        obj.classes_ = np.asarray(d["classes"])
        obj._X = np.asarray(d["X"], dtype=np.float64)
        obj._y_enc = np.asarray(d["y_enc"], dtype=np.intp)
        return obj
