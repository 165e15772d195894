"""Exact t-SNE: perplexity-calibrated affinities, full pairwise gradients."""
from __future__ import annotations

import numpy as np

from ..errors import InvalidParameterError
from .reduce import Embedding

_EPS = 1e-12
_EARLY_EXAGGERATION = 12.0
_EARLY_ITERS = 250
_POLISH_ITERS = 100


def _squared_distances(X: np.ndarray) -> np.ndarray:
    sq = np.sum(X**2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.fill_diagonal(d2, 0.0)
    return np.maximum(d2, 0.0)


def conditional_affinities(D2: np.ndarray, perplexity: float, tol: float = 1e-5,
                           max_steps: int = 64) -> tuple[np.ndarray, np.ndarray]:
    """Per-row Gaussian affinities whose entropy matches log(perplexity).

    For each row a precision beta is found by bisection so the conditional
    distribution over the other points has perplexity within tol (in
    log-space) of the target.  Returns (P_conditional, betas).
    """
    n = D2.shape[0]
    target = float(np.log(perplexity))
    P = np.zeros((n, n))
    betas = np.ones(n)
    others = ~np.eye(n, dtype=bool)
    for i in range(n):
        di = D2[i][others[i]]
        beta, beta_lo, beta_hi = 1.0, 0.0, np.inf
        p = np.zeros_like(di)
        for _ in range(max_steps):
            p = np.exp(-di * beta)
            total = p.sum()
            if total <= 0.0:
                entropy = 0.0
            else:
                entropy = float(np.log(total) + beta * (di @ p) / total)
            diff = entropy - target
            if abs(diff) < tol:
                break
            if diff > 0:  # too spread out: sharpen
                beta_lo = beta
                beta = beta * 2.0 if not np.isfinite(beta_hi) else 0.5 * (beta + beta_hi)
            else:
                beta_hi = beta
                beta = beta / 2.0 if beta_lo == 0.0 else 0.5 * (beta + beta_lo)
        total = p.sum()
        P[i][others[i]] = p / total if total > 0 else 1.0 / di.size
        betas[i] = beta
    return P, betas


def tsne_reduce(X, perplexity: float = 30.0, iters: int = 1000, seed: int = 0,
                learning_rate: float = 200.0) -> Embedding:
    """Embed rows of X in 2-D by gradient descent on the KL divergence.

    Plain (non-approximated) t-SNE: symmetrized Gaussian input affinities,
    Student-t low-dimensional kernel, early exaggeration for the first 250
    iterations, momentum 0.5 then 0.8, and adaptive per-coordinate gains.
    The KL trace rides along in params for convergence checks.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise InvalidParameterError("X must be 2-D")
    n = X.shape[0]
    if perplexity < 1:
        raise InvalidParameterError("perplexity must be at least 1")
    if n <= 3 * perplexity:
        raise InvalidParameterError(
            f"perplexity {perplexity} too large for {n} points (need n > 3*perplexity)")
    if iters < 1:
        raise InvalidParameterError("iters must be positive")

    cond, _ = conditional_affinities(_squared_distances(X), perplexity)
    P = (cond + cond.T) / (2.0 * n)
    P = np.maximum(P, _EPS)

    def kl_and_kernel(Y: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
        num = 1.0 / (1.0 + _squared_distances(Y))
        np.fill_diagonal(num, 0.0)
        Q = np.maximum(num / num.sum(), _EPS)
        return float(np.sum(P * np.log(P / Q))), num, Q

    rng = np.random.default_rng(seed)
    Y = rng.normal(0.0, 1e-4, (n, 2))
    velocity = np.zeros_like(Y)
    gains = np.ones_like(Y)
    kl_history = np.empty(iters)
    # Momentum leaves small oscillations; the final iterations switch to
    # backtracking descent so the KL trace ends monotone non-increasing.
    polish_start = max(iters - _POLISH_ITERS, min(_EARLY_ITERS, iters))
    step = learning_rate

    for it in range(iters):
        kl, num, Q = kl_and_kernel(Y)
        kl_history[it] = kl
        exaggeration = _EARLY_EXAGGERATION if it < _EARLY_ITERS else 1.0
        W = (exaggeration * P - Q) * num
        grad = 4.0 * (W.sum(axis=1)[:, None] * Y - W @ Y)

        if it < polish_start:
            momentum = 0.5 if it < _EARLY_ITERS else 0.8
            flipped = np.sign(grad) != np.sign(velocity)
            gains = np.where(flipped, gains + 0.2, gains * 0.8)
            gains = np.maximum(gains, 0.01)
            velocity = momentum * velocity - learning_rate * gains * grad
            Y = Y + velocity
            Y -= Y.mean(axis=0)
        else:
            while step > 1e-12:
                candidate = Y - step * grad
                candidate -= candidate.mean(axis=0)
                if kl_and_kernel(candidate)[0] <= kl:
                    Y = candidate
                    step = min(step * 1.1, learning_rate)
                    break
                step *= 0.5

    return Embedding(points=Y, method="tsne",
                     params={"perplexity": perplexity, "iters": iters, "seed": seed,
                             "learning_rate": learning_rate,
                             "kl_history": kl_history})
