"""Bootstrap ensemble of decision trees with probability averaging."""
from __future__ import annotations

import numpy as np

from ..errors import InvalidParameterError
from .tree import DecisionTreeClassifier


class RandomForestClassifier:
    """Seeded random forest: bootstrap rows, sqrt-feature splits, mean votes.

    Per-tree randomness comes from independent child streams of the forest
    seed, so trees can be trained in any order (or in parallel) with
    identical results. With ``n_estimators=1, bootstrap=False,
    max_features=None`` the forest degenerates to a single plain tree.
    """

    def __init__(self, n_estimators=100, max_depth=None, max_features="sqrt", bootstrap=True, seed=0):
        if n_estimators < 1:
            raise InvalidParameterError("need at least one tree")
        self.n_estimators = n_estimators
        self.max_depth = max_depth
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.seed = seed
        self.trees_: list[DecisionTreeClassifier] = []
        self.classes_: np.ndarray | None = None

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        self.classes_ = np.unique(y)
        if self.classes_.size < 2:
            raise InvalidParameterError("need at least 2 classes to fit")
        n = X.shape[0]
        self.trees_ = []
        for child_seq in np.random.SeedSequence(self.seed).spawn(self.n_estimators):
            rng = np.random.default_rng(child_seq)
            idx = rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            tree = DecisionTreeClassifier(
                max_depth=self.max_depth, max_features=self.max_features, rng=rng
            )
            # a bootstrap draw may miss classes; trees vote on the ones they saw
            tree.fit(X[idx], y[idx])
            self.trees_.append(tree)
        return self

    def predict_proba(self, X) -> np.ndarray:
        if not self.trees_:
            raise InvalidParameterError("classifier not fitted")
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        out = np.zeros((X.shape[0], self.classes_.size))
        class_index = {c: i for i, c in enumerate(self.classes_.tolist())}
        for tree in self.trees_:
            probs = tree.predict_proba(X)
            cols = [class_index[c] for c in tree.classes_.tolist()]
            out[:, cols] += probs
        out /= self.n_estimators
        # renormalize in case some trees missed classes entirely
        sums = out.sum(axis=1, keepdims=True)
        sums[sums == 0] = 1.0
        return out / sums

    def predict(self, X) -> np.ndarray:
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    @property
    def feature_importances_(self) -> np.ndarray:
        stacked = np.mean([t.feature_importances_ for t in self.trees_], axis=0)
        total = stacked.sum()
        return stacked / total if total > 0 else stacked

    def to_dict(self) -> dict:
        return {
            "n_estimators": self.n_estimators,
            "max_depth": self.max_depth,
            "max_features": self.max_features,
            "bootstrap": self.bootstrap,
            "seed": self.seed,
            "classes": self.classes_.tolist(),
            "trees": [t.to_dict() for t in self.trees_],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RandomForestClassifier":
        obj = cls(
            n_estimators=d["n_estimators"],
            max_depth=d["max_depth"],
            max_features=d["max_features"],
            bootstrap=d["bootstrap"],
            seed=d["seed"],
        )
        obj.classes_ = np.asarray(d["classes"])
        obj.trees_ = [DecisionTreeClassifier.from_dict(t) for t in d["trees"]]
        return obj
