"""Fuzzy C-means: soft cluster memberships via alternating optimization."""
from __future__ import annotations

import numpy as np

from ..errors import InvalidParameterError
from .kmeans import ClusterAssignment, _sq_dists


def _memberships(d2: np.ndarray, m: float) -> np.ndarray:
    """Row-stochastic memberships from squared distances.

    A point coincident with one or more centers gets its membership split
    over exactly those centers (the limit of the update rule).
    """
    power = 1.0 / (m - 1.0)
    zero = d2 <= 0.0
    U = np.empty_like(d2)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = d2 ** -power
        U = inv / inv.sum(axis=1, keepdims=True)
    hit = zero.any(axis=1)
    if np.any(hit):
        U[hit] = zero[hit] / zero[hit].sum(axis=1, keepdims=True)
    return U


def fuzzy_cmeans(X, k: int, m: float = 2.0, seed: int = 0, max_iter: int = 300,
                 tol: float = 1e-6) -> ClusterAssignment:
    """Soft clustering with fuzzifier m; memberships row-sum to 1.

    Alternates weighted-center and membership updates until the largest
    membership change drops below tol.  The objective sum(u^m * d^2) is
    non-increasing across iterations.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidParameterError("X must be 2-D")
    n = X.shape[0]
    if not 1 <= k <= n:
        raise InvalidParameterError(f"k must be in [1, {n}], got {k}")
    if m <= 1:
        raise InvalidParameterError(f"fuzzifier m must exceed 1, got {m}")
    rng = np.random.default_rng(seed)
    U = rng.random((n, k))
    U /= U.sum(axis=1, keepdims=True)

    history: list[float] = []
    centers = np.empty((k, X.shape[1]))
    for it in range(max_iter):
        W = U**m
        centers = (W.T @ X) / W.sum(axis=0)[:, None]
        d2 = _sq_dists(X, centers)
        history.append(float(np.sum(W * d2)))
        U_new = _memberships(d2, m)
        change = float(np.max(np.abs(U_new - U)))
        U = U_new
        if change < tol:
            break

    d2 = _sq_dists(X, centers)
    objective = float(np.sum(U**m * d2))
    history.append(objective)
    return ClusterAssignment(hard_labels=np.argmax(U, axis=1), centers=centers,
                             membership=U, inertia=objective, n_iter=it + 1,
                             objective_history=history)
