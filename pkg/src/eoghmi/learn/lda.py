"""Linear discriminant classification with a shrunk covariance estimate."""
from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

from ..errors import InvalidParameterError


def ledoit_wolf_shrinkage(Z: np.ndarray) -> float:
    """Optimal shrinkage intensity toward the scaled identity for centered rows.

    Minimizes the expected Frobenius loss of (1-g)*S + g*(tr(S)/d)*I
    following the well-conditioned-estimator construction: g = b^2/d^2 with
    b^2 the (capped) estimation-error term and d^2 the dispersion of S
    around its isotropic projection.
    """
    n, d = Z.shape
    if n < 2:
        return 1.0
    S = (Z.T @ Z) / n
    mu = np.trace(S) / d
    s_norm2 = np.sum(S * S)
    d2 = s_norm2 / d - mu**2
    if d2 <= 0:
        return 0.0
    row_norms2 = np.sum(Z * Z, axis=1)
    b2 = (np.sum(row_norms2**2) / n**2 - s_norm2 / n) / d
    b2 = min(b2, d2)
    return float(max(0.0, b2 / d2))


class ShrinkageLdaClassifier:
    """LDA whose pooled covariance is blended with a scaled identity.

    ``shrinkage`` is a value in [0, 1] or "auto" (data-driven Ledoit-Wolf
    intensity computed on the class-centered rows). Any positive intensity
    keeps the estimate invertible even with constant or collinear features.
    """

    def __init__(self, shrinkage="auto"):
        if shrinkage != "auto" and not 0.0 <= float(shrinkage) <= 1.0:
            raise InvalidParameterError("shrinkage must be 'auto' or in [0, 1]")
        self.shrinkage = shrinkage
        self.classes_: np.ndarray | None = None
        self.means_: np.ndarray | None = None
        self.priors_: np.ndarray | None = None
        self.shrinkage_used_: float | None = None
        self._sigma_inv: np.ndarray | None = None

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        self.classes_, y_enc = np.unique(y, return_inverse=True)
        if self.classes_.size < 2:
            raise InvalidParameterError("need at least 2 classes to fit")
        n, d = X.shape
        self.means_ = np.stack([X[y_enc == c].mean(axis=0) for c in range(self.classes_.size)])
        self.priors_ = np.bincount(y_enc).astype(np.float64) / n
        centered = X - self.means_[y_enc]
        gamma = ledoit_wolf_shrinkage(centered) if self.shrinkage == "auto" else float(self.shrinkage)
        self.shrinkage_used_ = gamma
        sigma = (centered.T @ centered) / n
        sigma = (1.0 - gamma) * sigma + gamma * (np.trace(sigma) / d) * np.eye(d)
        self._sigma_inv = np.linalg.pinv(sigma)
        return self

    def _log_scores(self, X: np.ndarray) -> np.ndarray:
        # delta_c(x) = x' S^-1 mu_c - mu_c' S^-1 mu_c / 2 + log prior_c
        A = self.means_ @ self._sigma_inv  # (C, d)
        linear = X @ A.T
        offset = -0.5 * np.sum(A * self.means_, axis=1) + np.log(self.priors_)
        return linear + offset

    def predict_proba(self, X) -> np.ndarray:
        if self.means_ is None:
            raise InvalidParameterError("classifier not fitted")
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        scores = self._log_scores(X)
        return np.exp(scores - logsumexp(scores, axis=1, keepdims=True))

    def predict(self, X) -> np.ndarray:
        if self.means_ is None:
            raise InvalidParameterError("classifier not fitted")
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        return self.classes_[np.argmax(self._log_scores(X), axis=1)]

    def to_dict(self) -> dict:
        return {
            "shrinkage": self.shrinkage,
            "shrinkage_used": self.shrinkage_used_,
            "classes": self.classes_.tolist(),
            "means": self.means_.tolist(),
            "priors": self.priors_.tolist(),
            "sigma_inv": self._sigma_inv.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ShrinkageLdaClassifier":
        obj = cls(shrinkage=d["shrinkage"])
        obj.shrinkage_used_ = d["shrinkage_used"]
        obj.classes_ = np.asarray(d["classes"])
        obj.means_ = np.asarray(d["means"], dtype=np.float64)
        obj.priors_ = np.asarray(d["priors"], dtype=np.float64)
        obj._sigma_inv = np.asarray(d["sigma_inv"], dtype=np.float64)
        return obj
