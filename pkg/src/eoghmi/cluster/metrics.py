"""Cluster quality scores: entropy-based external metrics and silhouettes."""
from __future__ import annotations

import numpy as np

from ..errors import InvalidParameterError
from .fcm import fuzzy_cmeans
from .kmeans import kmeans


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-np.sum(p * np.log(p)))


def external_metrics(labels_true, labels_pred) -> dict:
    """Homogeneity, completeness, and their harmonic mean (V-measure).

    All three are computed from the contingency table's entropies and are
    invariant to renaming labels on either side.
    """
    labels_true = np.asarray(labels_true)
    labels_pred = np.asarray(labels_pred)
    if labels_true.shape != labels_pred.shape:
        raise InvalidParameterError("label arrays must have equal length")
    n = labels_true.size
    if n == 0:
        raise InvalidParameterError("empty labelings")
    _, ti = np.unique(labels_true, return_inverse=True)
    _, pi = np.unique(labels_pred, return_inverse=True)
    n_true, n_pred = ti.max() + 1, pi.max() + 1
    contingency = np.zeros((n_true, n_pred))
    np.add.at(contingency, (ti, pi), 1.0)

    h_true = _entropy(contingency.sum(axis=1))
    h_pred = _entropy(contingency.sum(axis=0))
    p = contingency / n
    col = contingency.sum(axis=0) / n
    row = contingency.sum(axis=1) / n
    with np.errstate(divide="ignore", invalid="ignore"):
        h_true_given_pred = float(-np.sum(p * np.where(p > 0, np.log(p / col[None, :]), 0.0),
                                          where=p > 0))
        h_pred_given_true = float(-np.sum(p * np.where(p > 0, np.log(p / row[:, None]), 0.0),
                                          where=p > 0))

    homogeneity = 1.0 if h_true == 0 else 1.0 - h_true_given_pred / h_true
    completeness = 1.0 if h_pred == 0 else 1.0 - h_pred_given_true / h_pred
    if homogeneity + completeness == 0:
        v_measure = 0.0
    else:
        v_measure = 2 * homogeneity * completeness / (homogeneity + completeness)
    return {"homogeneity": float(np.clip(homogeneity, 0.0, 1.0)),
            "completeness": float(np.clip(completeness, 0.0, 1.0)),
            "v_measure": float(np.clip(v_measure, 0.0, 1.0))}


def _pairwise_distances(X: np.ndarray) -> np.ndarray:
    sq = np.sum(X**2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.fill_diagonal(d2, 0.0)
    return np.sqrt(np.maximum(d2, 0.0))


def silhouette_samples(X, labels) -> tuple[np.ndarray, np.ndarray]:
    """Per-point silhouette s = (b - a) / max(a, b) and a singleton flag.

    a is the mean distance to the point's own cluster (excluding itself), b
    the smallest mean distance to any other cluster.  Points alone in their
    cluster get s = 0 and are flagged.
    """
    X = np.asarray(X, dtype=np.float64)
    labels = np.asarray(labels)
    if X.ndim != 2 or X.shape[0] != labels.size:
        raise InvalidParameterError("X rows and labels must align")
    uniq, idx = np.unique(labels, return_inverse=True)
    k = uniq.size
    if k < 2:
        raise InvalidParameterError("silhouette needs at least 2 clusters")
    n = X.shape[0]
    D = _pairwise_distances(X)
    onehot = np.zeros((n, k))
    onehot[np.arange(n), idx] = 1.0
    sums = D @ onehot                      # distance mass to each cluster
    sizes = onehot.sum(axis=0)

    own_size = sizes[idx]
    singleton = own_size == 1
    with np.errstate(invalid="ignore", divide="ignore"):
        a = sums[np.arange(n), idx] / np.maximum(own_size - 1, 1)
        means = sums / sizes[None, :]
        means[np.arange(n), idx] = np.inf
        b = means.min(axis=1)
        denom = np.maximum(a, b)
        s = np.where(denom > 0, (b - a) / denom, 0.0)
    s[singleton] = 0.0
    return s, singleton


def silhouette(X, labels) -> float:
    """Plain mean of per-point silhouette values."""
    s, _ = silhouette_samples(X, labels)
    return float(s.mean())


def average_silhouette_width(X, labels) -> float:
    """Cluster-averaged silhouette: mean within each cluster, then across clusters.

    Differs from the flat mean when cluster sizes are unbalanced; this is the
    variant that drives the optimum-k sweep.
    """
    s, _ = silhouette_samples(X, labels)
    labels = np.asarray(labels)
    per_cluster = [float(s[labels == lab].mean()) for lab in np.unique(labels)]
    return float(np.mean(per_cluster))


_ALGOS = {
    "kmeans": lambda X, k, seed: kmeans(X, k, seed=seed),
    "fcm": lambda X, k, seed: fuzzy_cmeans(X, k, seed=seed),
}


def asw_sweep(X, algo="kmeans", k_range=range(2, 11), seed: int = 0,
              n_init: int = 5) -> dict:
    """Cluster at each k and score with the cluster-averaged silhouette.

    Each k gets ``n_init`` independently seeded runs and keeps the one with
    the lowest final objective, guarding the sweep against bad single-run
    local optima.  Returns per-k scores (both averaging variants) and the
    argmax k; ties go to the smaller k.  ``algo`` is "kmeans", "fcm", or a
    callable ``(X, k, seed) -> ClusterAssignment``.
    """
    X = np.asarray(X, dtype=np.float64)
    run = _ALGOS.get(algo, algo) if isinstance(algo, str) else algo
    if not callable(run):
        raise InvalidParameterError(f"unknown clustering algorithm {algo!r}")
    ks = sorted(set(int(k) for k in k_range))
    if not ks or ks[0] < 2:
        raise InvalidParameterError("k_range must contain integers >= 2")
    if n_init < 1:
        raise InvalidParameterError("n_init must be >= 1")
    per_k: dict[int, float] = {}
    flat_per_k: dict[int, float] = {}
    best_k, best_score = None, -np.inf
    for k in ks:
        run_seeds = np.random.SeedSequence([seed, k]).generate_state(n_init)
        assignment = min((run(X, k, int(s)) for s in run_seeds),
                         key=lambda a: a.objective_history[-1])
        per_k[k] = average_silhouette_width(X, assignment.hard_labels)
        flat_per_k[k] = silhouette(X, assignment.hard_labels)
        if per_k[k] > best_score:
            best_k, best_score = k, per_k[k]
    return {"per_k": per_k, "flat_per_k": flat_per_k, "best_k": best_k}
