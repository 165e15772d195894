"""Statistical procedures: envelope sequences, stationarity testing,
repeated-measures ANOVA with sphericity correction, and correlation.

The unit-root test is implemented from first principles (lag-augmented
level regression, AIC lag selection, response-surface p-values) so its
internals stay inspectable; library implementations are used only as
cross-check oracles in the test suite.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _sps

from . import dsp
from .errors import DegenerateInputError, InvalidParameterError
from .trace import SignalTrace

LOG_FLOOR = 1e-8

# MacKinnon (1994) approximate asymptotic p-value surface for the
# constant-only Dickey-Fuller distribution: p = Phi(poly(tau)), with the
# small-tau/large-tau polynomial switched at TAU_STAR and hard 0/1 clamps
# outside [TAU_MIN, TAU_MAX].
_TAU_STAR = -1.61
_TAU_MIN = -18.83
_TAU_MAX = 2.74
_TAU_SMALLP = (2.1659, 1.4412, 0.038269)
_TAU_LARGEP = (1.7339, 0.93202, -0.12745, -0.010368)

# MacKinnon (2010) finite-sample critical-value response surface for the
# constant-only case: cv(T) = b0 + b1/T + b2/T^2 + b3/T^3.
_CRIT_SURFACE = {
    "1%": (-3.43035, -6.5393, -16.786, -79.433),
    "5%": (-2.86154, -2.8903, -4.234, -40.04),
    "10%": (-2.56677, -1.5384, -2.809, 0.0),
}


@dataclass
class EnvelopeSequences:
    """Per-second log amplitude summaries of a trace's analytic envelope."""

    avg_seq: np.ndarray
    std_seq: np.ndarray

    def __post_init__(self):
        self.avg_seq = np.asarray(self.avg_seq, dtype=np.float64)
        self.std_seq = np.asarray(self.std_seq, dtype=np.float64)
        if self.avg_seq.shape != self.std_seq.shape:
            raise InvalidParameterError("avg/std sequences must have equal length")
        if not (np.all(np.isfinite(self.avg_seq)) and np.all(np.isfinite(self.std_seq))):
            raise InvalidParameterError("envelope sequences must be finite")


@dataclass
class TestReport:
    """Outcome of a hypothesis test: statistic, p-value, and method detail."""

    statistic: float
    p_value: float
    detail: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise InvalidParameterError(f"p-value {self.p_value} outside [0, 1]")


def envelope_sequences(trace: SignalTrace) -> EnvelopeSequences:
    """Log10 of the mean and spread of the Hilbert envelope per full second.

    The envelope is computed over the whole trace first (no per-window edge
    artifacts), then summarized over non-overlapping one-second windows.
    Values are floored at LOG_FLOOR before the log so silence stays finite.
    """
    n_windows = int(len(trace) // trace.fs)
    if n_windows < 2:
        raise InvalidParameterError("need at least 2 full seconds of signal")
    win = int(round(trace.fs))
    env = dsp.hilbert_envelope(trace)
    chunks = env[: n_windows * win].reshape(n_windows, win)
    avg = np.log10(np.maximum(chunks.mean(axis=1), LOG_FLOOR))
    std = np.log10(np.maximum(chunks.std(axis=1), LOG_FLOOR))
    return EnvelopeSequences(avg_seq=avg, std_seq=std)


def decimate_by_mean(seq: np.ndarray, factor: int = 5) -> np.ndarray:
    """Average every ``factor`` consecutive values; an incomplete tail is dropped."""
    if factor < 1:
        raise InvalidParameterError("factor must be >= 1")
    seq = np.asarray(seq, dtype=np.float64)
    n = seq.size // factor
    if n == 0:
        raise InvalidParameterError(f"sequence of {seq.size} too short for factor {factor}")
    return seq[: n * factor].reshape(n, factor).mean(axis=1)


def _ols(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float, np.ndarray]:
    """Least squares fit returning (coefficients, ssr, coefficient covariance)."""
    coef, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    ssr = float(resid @ resid)
    nobs, k = X.shape
    sigma2 = ssr / (nobs - k)
    cov = sigma2 * np.linalg.inv(X.T @ X)
    return coef, ssr, cov


def _lag_matrix(y: np.ndarray, lag: int) -> tuple[np.ndarray, np.ndarray]:
    """Regression pieces for the lag-augmented level regression.

    Rows are t = lag+1 .. n-1: response dy_t; regressors
    [y_{t-1}, dy_{t-1}, ..., dy_{t-lag}, 1].
    """
    dy = np.diff(y)
    rows = dy.size - lag
    response = dy[lag:]
    cols = [y[lag:-1]]
    for j in range(1, lag + 1):
        cols.append(dy[lag - j : lag - j + rows])
    cols.append(np.ones(rows))
    return np.column_stack(cols), response


def _mackinnon_pvalue(tau: float) -> float:
    if tau > _TAU_MAX:
        return 1.0
    if tau < _TAU_MIN:
        return 0.0
    coeffs = _TAU_SMALLP if tau <= _TAU_STAR else _TAU_LARGEP
    poly = sum(c * tau**i for i, c in enumerate(coeffs))
    return float(_sps.norm.cdf(poly))


def critical_values(nobs: int) -> dict[str, float]:
    """Finite-sample critical values for the constant-only unit-root statistic."""
    return {
        level: float(b0 + b1 / nobs + b2 / nobs**2 + b3 / nobs**3)
        for level, (b0, b1, b2, b3) in _CRIT_SURFACE.items()
    }


def adf_test(seq: np.ndarray, max_lag: int | None = None) -> TestReport:
    """Unit-root test on a level sequence (regression with constant, no trend).

    The lag order is chosen by AIC over 0..max_lag on a common sample (all
    candidates see the same rows), then the statistic is refit using every
    observation the chosen lag allows. The null hypothesis is a unit root;
    small p-values indicate stationarity.
    """
    y = np.asarray(seq, dtype=np.float64)
    if y.ndim != 1:
        raise InvalidParameterError("sequence must be 1-D")
    n = y.size
    if n < 15:
        raise InvalidParameterError(f"need at least 15 observations, got {n}")
    if np.ptp(y) == 0:
        raise DegenerateInputError("constant sequence has no unit-root question to answer")
    if max_lag is None:
        max_lag = int(math.floor(12.0 * (n / 100.0) ** 0.25))
    max_lag = min(max_lag, n // 2 - 2)
    if max_lag < 0:
        raise InvalidParameterError("sequence too short for lag selection")

    # AIC comparison on the common sample defined by the largest candidate.
    X_full, resp_full = _lag_matrix(y, max_lag)
    nobs = resp_full.size
    best = None
    for lag in range(max_lag + 1):
        keep = [0] + list(range(1, lag + 1)) + [max_lag + 1]
        X = X_full[:, keep]
        coef, ssr, _ = _ols(X, resp_full)
        k_params = lag + 2
        aic = nobs * math.log(ssr / nobs) + 2 * k_params
        if best is None or aic < best[0]:
            best = (aic, lag)
    _, chosen = best

    X, resp = _lag_matrix(y, chosen)
    coef, ssr, cov = _ols(X, resp)
    tau = float(coef[0] / math.sqrt(cov[0, 0]))
    used_obs = resp.size
    return TestReport(
        statistic=tau,
        p_value=_mackinnon_pvalue(tau),
        detail={
            "lag": chosen,
            "nobs": used_obs,
            "critical_values": critical_values(used_obs),
            "max_lag": max_lag,
        },
    )


def rm_anova_gg(data: np.ndarray) -> TestReport:
    """One-way within-subject F test with an unconditional sphericity correction.

    ``data`` is subjects x conditions, complete. The correction factor
    epsilon is estimated from the double-centered condition covariance and
    multiplies both degrees of freedom; it is clamped to its analytic range
    [1/(k-1), 1], so two-condition designs always get epsilon = 1.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2:
        raise InvalidParameterError("data must be a subjects x conditions matrix")
    n, k = data.shape
    if n < 2 or k < 2:
        raise InvalidParameterError("need >= 2 subjects and >= 2 conditions")
    if not np.all(np.isfinite(data)):
        raise InvalidParameterError("missing or non-finite cells are not allowed")

    grand = data.mean()
    cond_means = data.mean(axis=0)
    subj_means = data.mean(axis=1)
    ss_cond = n * np.sum((cond_means - grand) ** 2)
    ss_subj = k * np.sum((subj_means - grand) ** 2)
    ss_total = np.sum((data - grand) ** 2)
    ss_error = ss_total - ss_cond - ss_subj
    df1 = k - 1
    df2 = (k - 1) * (n - 1)

    # Double-centered condition covariance drives the sphericity estimate.
    cov = np.cov(data, rowvar=False, ddof=1)
    centered = cov - cov.mean(axis=0, keepdims=True) - cov.mean(axis=1, keepdims=True) + cov.mean()
    num = np.trace(centered) ** 2
    den = df1 * np.sum(centered**2)
    epsilon = 1.0 if den <= 1e-300 else float(num / den)
    epsilon = min(1.0, max(1.0 / df1, epsilon))

    if ss_cond <= 1e-300 and ss_error <= 1e-300:
        return TestReport(statistic=0.0, p_value=1.0, detail={"epsilon": epsilon, "df1": df1, "df2": df2})
    if ss_error <= 1e-300:
        return TestReport(statistic=float("inf"), p_value=0.0, detail={"epsilon": epsilon, "df1": df1, "df2": df2})

    f_stat = (ss_cond / df1) / (ss_error / df2)
    p = float(_sps.f.sf(f_stat, df1 * epsilon, df2 * epsilon))
    return TestReport(
        statistic=float(f_stat),
        p_value=p,
        detail={
            "epsilon": epsilon,
            "df1": df1,
            "df2": df2,
            "ss_conditions": float(ss_cond),
            "ss_subjects": float(ss_subj),
            "ss_error": float(ss_error),
        },
    )


def pearson_test(x: np.ndarray, y: np.ndarray) -> TestReport:
    """Pearson correlation with a two-tailed t-test on n-2 degrees of freedom."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise InvalidParameterError("x and y must be 1-D and equally long")
    n = x.size
    if n < 3:
        raise InvalidParameterError("need at least 3 pairs")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise DegenerateInputError("correlation undefined for a constant input")
    xc = x - x.mean()
    yc = y - y.mean()
    r = float(np.dot(xc, yc) / math.sqrt(np.dot(xc, xc) * np.dot(yc, yc)))
    r = max(-1.0, min(1.0, r))
    if 1.0 - r * r <= 0:
        return TestReport(statistic=r, p_value=0.0, detail={"t": float("inf") * np.sign(r), "df": n - 2})
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    p = float(2.0 * _sps.t.sf(abs(t), n - 2))
    return TestReport(statistic=r, p_value=p, detail={"t": float(t), "df": n - 2})


def summary_stats(x: np.ndarray) -> dict[str, float]:
    """Mean and sample standard deviation (n-1 denominator)."""
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2:
        raise InvalidParameterError("need at least 2 values")
    return {"mean": float(x.mean()), "sample_std": float(x.std(ddof=1))}
