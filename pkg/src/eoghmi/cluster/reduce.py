"""Linear dimension reduction: PCA and truncated SVD."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateInputError, InvalidParameterError


@dataclass
class Embedding:
    """Row-aligned low-dimensional coordinates plus how they were produced."""

    points: np.ndarray
    method: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.ndim != 2:
            raise InvalidParameterError("embedding points must be 2-D")
        if not np.all(np.isfinite(self.points)):
            raise InvalidParameterError("embedding contains non-finite coordinates")

    @property
    def n_points(self) -> int:
        return self.points.shape[0]


def _require_rank(X: np.ndarray, dims: int, singular_values: np.ndarray) -> None:
    tol = max(X.shape) * np.finfo(np.float64).eps * (singular_values[0] if singular_values.size else 0.0)
    rank = int(np.sum(singular_values > tol))
    if rank < dims:
        raise DegenerateInputError(f"matrix rank {rank} < requested {dims} components")


def pca_reduce(X, dims: int = 2) -> Embedding:
    """Project onto the top principal components after centering columns.

    Returns scores (centered data times orthonormal components).  The
    explained-variance ratio per kept component rides along in params.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidParameterError("X must be 2-D")
    n, d = X.shape
    if n <= dims:
        raise InvalidParameterError(f"need more than {dims} rows, got {n}")
    centered = X - X.mean(axis=0)
    U, s, Vt = np.linalg.svd(centered, full_matrices=False)
    _require_rank(centered, dims, s)
    scores = U[:, :dims] * s[:dims]
    total_var = float(np.sum(s**2))
    ratio = (s[:dims] ** 2 / total_var).tolist() if total_var > 0 else [0.0] * dims
    return Embedding(points=scores, method="pca",
                     params={"dims": dims, "components": Vt[:dims],
                             "explained_variance_ratio": ratio})


def tsvd_reduce(X, dims: int = 2) -> Embedding:
    """Project onto the top right-singular vectors of X without centering."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidParameterError("X must be 2-D")
    n, d = X.shape
    if n <= dims:
        raise InvalidParameterError(f"need more than {dims} rows, got {n}")
    U, s, Vt = np.linalg.svd(X, full_matrices=False)
    _require_rank(X, dims, s)
    return Embedding(points=U[:, :dims] * s[:dims], method="tsvd",
                     params={"dims": dims, "components": Vt[:dims]})
