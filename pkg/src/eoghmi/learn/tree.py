"""CART-style decision tree with Gini impurity and importance accounting.

The split search is vectorized: every candidate feature is sorted once and
class counts are accumulated cumulatively, so each node costs
O(m log m * q) for m samples and q candidate features. Ties between equally
good splits resolve to the lowest feature index and then the lowest
threshold, which keeps training deterministic.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidParameterError


@dataclass
class TreeNode:
    """Internal node (feature/threshold/children) or leaf (probabilities)."""

    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    probs: np.ndarray | None = None
    n_samples: int = 0

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"probs": self.probs.tolist(), "n": self.n_samples}
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "n": self.n_samples,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @staticmethod
    def from_dict(d: dict) -> "TreeNode":
        if "probs" in d:
            return TreeNode(probs=np.asarray(d["probs"], dtype=np.float64), n_samples=d["n"])
        return TreeNode(
            feature=d["feature"],
            threshold=d["threshold"],
            n_samples=d["n"],
            left=TreeNode.from_dict(d["left"]),
            right=TreeNode.from_dict(d["right"]),
        )


def _gini(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts / total
    return float(1.0 - np.sum(p * p))


class DecisionTreeClassifier:
    """Binary-split classification tree on continuous features.

    Parameters
    ----------
    max_depth : depth cap (None = unbounded).
    min_samples_split : smallest node that may still be split.
    max_features : number of features examined per split; "sqrt" for
        ceil(sqrt(d)), None for all. Sub-sampling uses the provided rng.
    """

    def __init__(self, max_depth=None, min_samples_split=2, max_features=None, rng=None):
        if max_depth is not None and max_depth < 1:
            raise InvalidParameterError("max_depth must be >= 1 or None")
        if min_samples_split < 2:
            raise InvalidParameterError("min_samples_split must be >= 2")
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.rng = rng or np.random.default_rng(0)
        self.root: TreeNode | None = None
        self.classes_: np.ndarray | None = None
        self.n_features_: int = 0
        self._importance_raw: np.ndarray | None = None

    def _n_candidates(self, d: int) -> int:
        if self.max_features is None:
            return d
        if self.max_features == "sqrt":
            return max(1, int(np.ceil(np.sqrt(d))))
        if isinstance(self.max_features, (int, np.integer)) and self.max_features >= 1:
            return min(d, int(self.max_features))
        raise InvalidParameterError(f"bad max_features {self.max_features!r}")

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise InvalidParameterError("X must be 2-D with one label per row")
        self.classes_, y_enc = np.unique(y, return_inverse=True)
        if self.classes_.size < 2:
            raise InvalidParameterError("need at least 2 classes to fit")
        self.n_features_ = X.shape[1]
        self._importance_raw = np.zeros(self.n_features_)
        self.root = self._build(X, y_enc, depth=0, n_total=X.shape[0])
        return self

    def _leaf(self, y_enc: np.ndarray) -> TreeNode:
        counts = np.bincount(y_enc, minlength=self.classes_.size).astype(np.float64)
        return TreeNode(probs=counts / counts.sum(), n_samples=y_enc.size)

    def _best_split(self, X, y_enc, features):
        m = X.shape[0]
        n_classes = self.classes_.size
        V = X[:, features]
        order = np.argsort(V, axis=0, kind="stable")
        Vs = np.take_along_axis(V, order, axis=0)
        Ys = y_enc[order]
        onehot = Ys[:, :, None] == np.arange(n_classes)[None, None, :]
        left_counts = np.cumsum(onehot, axis=0, dtype=np.float64)
        totals = left_counts[-1]  # per-column class counts (identical columns)
        left_n = np.arange(1, m, dtype=np.float64)[:, None]
        right_n = m - left_n
        lc = left_counts[:-1]
        rc = totals[None, :, :] - lc
        gini_left = 1.0 - np.sum((lc / left_n[:, :, None]) ** 2, axis=2)
        gini_right = 1.0 - np.sum((rc / right_n[:, :, None]) ** 2, axis=2)
        weighted = (left_n * gini_left + right_n * gini_right) / m
        # splits may only fall between distinct consecutive values
        valid = Vs[1:] > Vs[:-1]
        weighted = np.where(valid, weighted, np.inf)
        col_best_rows = np.argmin(weighted, axis=0)
        col_best_vals = weighted[col_best_rows, np.arange(weighted.shape[1])]
        best_col = int(np.argmin(col_best_vals))
        best_row = int(col_best_rows[best_col])
        best_val = float(col_best_vals[best_col])
        if not np.isfinite(best_val):
            return None
        threshold = 0.5 * (Vs[best_row, best_col] + Vs[best_row + 1, best_col])
        return features[best_col], float(threshold), best_val

    def _build(self, X, y_enc, depth, n_total):
        m = X.shape[0]
        counts = np.bincount(y_enc, minlength=self.classes_.size)
        parent_gini = _gini(counts.astype(np.float64))
        if (
            parent_gini == 0.0
            or m < self.min_samples_split
            or (self.max_depth is not None and depth >= self.max_depth)
        ):
            return self._leaf(y_enc)
        d = X.shape[1]
        q = self._n_candidates(d)
        if q < d:
            features = np.sort(self.rng.choice(d, size=q, replace=False))
        else:
            features = np.arange(d)
        found = self._best_split(X, y_enc, features)
        if found is None:
            return self._leaf(y_enc)
        feature, threshold, weighted = found
        if weighted >= parent_gini - 1e-12:
            return self._leaf(y_enc)
        go_left = X[:, feature] <= threshold
        self._importance_raw[feature] += (m / n_total) * (parent_gini - weighted)
        node = TreeNode(feature=int(feature), threshold=threshold, n_samples=m)
        node.left = self._build(X[go_left], y_enc[go_left], depth + 1, n_total)
        node.right = self._build(X[~go_left], y_enc[~go_left], depth + 1, n_total)
        return node

    def predict_proba(self, X) -> np.ndarray:
        if self.root is None:
            raise InvalidParameterError("classifier not fitted")
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        out = np.empty((X.shape[0], self.classes_.size))
        for i, x in enumerate(X):
            node = self.root
            while not node.is_leaf:
                node = node.left if x[node.feature] <= node.threshold else node.right
            out[i] = node.probs
        return out

    def predict(self, X) -> np.ndarray:
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    @property
    def feature_importances_(self) -> np.ndarray:
        """Gini importance, normalized to sum to 1 (zeros if no split was made)."""
        total = self._importance_raw.sum()
        if total == 0:
            return self._importance_raw.copy()
        return self._importance_raw / total

    def to_dict(self) -> dict:
        return {
            "classes": self.classes_.tolist(),
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "max_features": self.max_features,
            "n_features": self.n_features_,
            "root": self.root.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionTreeClassifier":
        obj = cls(max_depth=d["max_depth"], min_samples_split=d["min_samples_split"], max_features=d["max_features"])
        obj.classes_ = np.asarray(d["classes"])
        obj.n_features_ = d["n_features"]
        obj.root = TreeNode.from_dict(d["root"])
        obj._importance_raw = np.zeros(obj.n_features_)
        return obj
