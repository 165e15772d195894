"""Lloyd's algorithm with k-means++ seeding."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidParameterError


@dataclass
class ClusterAssignment:
    """Hard labels, centers, and (for fuzzy methods) a membership matrix."""

    hard_labels: np.ndarray
    centers: np.ndarray
    membership: np.ndarray | None = None
    inertia: float = 0.0
    n_iter: int = 0
    objective_history: list[float] = field(default_factory=list, repr=False)

    def __post_init__(self):
        self.hard_labels = np.asarray(self.hard_labels, dtype=np.intp)
        self.centers = np.asarray(self.centers, dtype=np.float64)
        if self.membership is not None:
            self.membership = np.asarray(self.membership, dtype=np.float64)
            if not np.allclose(self.membership.sum(axis=1), 1.0, atol=1e-9):
                raise InvalidParameterError("fuzzy memberships must row-sum to 1")

    @property
    def k(self) -> int:
        return self.centers.shape[0]


def _sq_dists(X: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """Squared Euclidean distance of every row to every center (n×k)."""
    diff = X[:, None, :] - centers[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def _kpp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++: spread initial centers proportionally to squared distance."""
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    closest = _sq_dists(X, centers[:1]).ravel()
    for j in range(1, k):
        total = closest.sum()
        if total <= 0:  # all points coincide with chosen centers
            centers[j:] = centers[0]
            return centers
        centers[j] = X[rng.choice(n, p=closest / total)]
        closest = np.minimum(closest, _sq_dists(X, centers[j:j + 1]).ravel())
    return centers


def kmeans(X, k: int, seed: int = 0, max_iter: int = 300, tol: float = 1e-6) -> ClusterAssignment:
    """Cluster rows of X into k groups minimizing within-cluster variance.

    Iterates until the largest center movement drops below tol or max_iter.
    Empty clusters are re-seeded from the point farthest from its assigned
    center, so every cluster in the result is non-empty.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidParameterError("X must be 2-D")
    n = X.shape[0]
    if not 1 <= k <= n:
        raise InvalidParameterError(f"k must be in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    centers = _kpp_init(X, k, rng)

    def assign(d2: np.ndarray) -> np.ndarray:
        labels = np.argmin(d2, axis=1)
        own = d2[np.arange(n), labels].copy()
        # keep clusters non-empty: give any orphan the worst-fit point
        for j in range(k):
            if not np.any(labels == j):
                farthest = int(np.argmax(own))
                labels[farthest] = j
                own[farthest] = 0.0
        return labels

    history: list[float] = []
    labels = np.zeros(n, dtype=np.intp)
    for it in range(max_iter):
        labels = assign(_sq_dists(X, centers))
        history.append(float(np.sum((X - centers[labels]) ** 2)))
        new_centers = np.empty_like(centers)
        for j in range(k):
            new_centers[j] = X[labels == j].mean(axis=0)
        shift = float(np.max(np.linalg.norm(new_centers - centers, axis=1)))
        centers = new_centers
        if shift < tol:
            break

    labels = assign(_sq_dists(X, centers))
    inertia = float(np.sum((X - centers[labels]) ** 2))
    history.append(inertia)
    return ClusterAssignment(hard_labels=labels, centers=centers, inertia=inertia,
                             n_iter=it + 1, objective_history=history)
