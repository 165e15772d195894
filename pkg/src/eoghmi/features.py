"""Per-window feature extraction (29 dims), context stacking (87 dims), normalization.

The canonical feature order is versioned: any change to the list, the
conventions, or the defaults below must bump FEATURE_SCHEMA_VERSION.

Degenerate-input conventions (all documented where they apply): zero-energy
windows yield 0 for ratio-style features; entropy of an empty distribution is
0; the coefficient of variation is 0 when the mean is 0; kurtosis/skewness of
a constant window are 0.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import stats as _scipy_stats

from .errors import InvalidParameterError
from .trace import WindowSegment

FEATURE_SCHEMA_VERSION = "eoghmi-features/1"

FEATURE_NAMES: tuple[str, ...] = (
    "zcr",
    "ste",
    "stee",
    "spectral_entropy",
    "spectral_centroid",
    "spectral_bandwidth",
    "spectral_rolloff",
    "spectral_contrast_1",
    "spectral_contrast_2",
    "spectral_contrast_3",
    "spectral_contrast_4",
    "spectral_contrast_5",
    "poly_coef_3",
    "poly_coef_2",
    "poly_coef_1",
    "poly_coef_0",
    "pav",
    "vav",
    "auc",
    "kurtosis",
    "skewness",
    "mean",
    "median",
    "std",
    "cv",
    "wavelet_mean",
    "wavelet_std",
    "wavelet_energy",
    "wavelet_entropy",
)

N_FEATURES = len(FEATURE_NAMES)  # 29
CONTEXT_WINDOWS = 3
N_STACKED = N_FEATURES * CONTEXT_WINDOWS  # 87

STACKED_NAMES: tuple[str, ...] = tuple(
    f"w{w}_{name}" for w in range(CONTEXT_WINDOWS) for name in FEATURE_NAMES
)

# 8-tap Daubechies-4 decomposition low-pass; high-pass by quadrature mirror.
_DB4_LO = np.array(
    [
        -0.010597401784997278,
        0.032883011666982945,
        0.030841381835986965,
        -0.18703481171888114,
        -0.02798376941698385,
        0.6308807679295904,
        0.7148465705525415,
        0.23037781330885523,
    ]
)
_HAAR_LO = np.array([1.0, 1.0]) / np.sqrt(2.0)

_WAVELETS = {"db4": _DB4_LO, "haar": _HAAR_LO}


def _as_samples(window) -> np.ndarray:
    if isinstance(window, WindowSegment):
        return window.samples
    return np.asarray(window, dtype=np.float64)


def zcr(window) -> float:
    """Rate of positive-to-negative sign changes; zero counts as non-negative."""
    x = _as_samples(window)
    if x.size < 2:
        raise InvalidParameterError("zcr needs at least 2 samples")
    drops = (x[:-1] >= 0) & (x[1:] < 0)
    return float(np.count_nonzero(drops) / (x.size - 1))


def short_term_energy(window) -> float:
    """Mean of squared samples."""
    x = _as_samples(window)
    if x.size == 0:
        raise InvalidParameterError("empty window")
    return float(np.mean(x**2))


def energy_entropy(window, n_subframes: int = 10) -> float:
    """Shannon entropy (nats) of the sub-frame energy distribution.

    The window is split into ``n_subframes`` equal parts (tail truncated);
    maximal, log(K), when all sub-frames carry equal energy. Zero-energy
    windows return 0.
    """
    x = _as_samples(window)
    if n_subframes < 1:
        raise InvalidParameterError("need at least one sub-frame")
    sub_len = x.size // n_subframes
    if sub_len < 1:
        raise InvalidParameterError(f"window of {x.size} too short for {n_subframes} sub-frames")
    trimmed = x[: sub_len * n_subframes].reshape(n_subframes, sub_len)
    energies = np.sum(trimmed**2, axis=1)
    total = energies.sum()
    if total == 0:
        return 0.0
    p = energies / total
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def _magnitude_spectrum(x: np.ndarray, fs: float) -> tuple[np.ndarray, np.ndarray]:
    mag = np.abs(np.fft.rfft(x))
    freqs = np.fft.rfftfreq(x.size, d=1.0 / fs)
    return mag, freqs


def spectral_entropy(window, fs: float = 1.0) -> float:
    """Entropy (bits) of the normalized magnitude spectrum; 0 for zero energy."""
    x = _as_samples(window)
    mag, _ = _magnitude_spectrum(x, fs)
    total = mag.sum()
    if total == 0:
        return 0.0
    p = mag / total
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def spectral_centroid(window, fs: float) -> float:
    """Magnitude-weighted mean frequency in Hz; 0 for zero energy."""
    x = _as_samples(window)
    mag, freqs = _magnitude_spectrum(x, fs)
    total = mag.sum()
    if total == 0:
        return 0.0
    return float(np.sum(freqs * mag) / total)


def spectral_bandwidth(window, fs: float, p: int = 2) -> float:
    """p-th order spread of the normalized magnitude spectrum around its centroid."""
    if p < 1:
        raise InvalidParameterError("bandwidth order must be >= 1")
    x = _as_samples(window)
    mag, freqs = _magnitude_spectrum(x, fs)
    total = mag.sum()
    if total == 0:
        return 0.0
    weights = mag / total
    centroid = float(np.sum(freqs * weights))
    return float(np.sum(weights * np.abs(freqs - centroid) ** p) ** (1.0 / p))


def spectral_rolloff(window, fs: float, fraction: float = 0.85) -> float:
    """Frequency below which ``fraction`` of the spectral energy lies; 0 for silence."""
    if not 0 < fraction < 1:
        raise InvalidParameterError("rolloff fraction must be in (0, 1)")
    x = _as_samples(window)
    mag, freqs = _magnitude_spectrum(x, fs)
    power = mag**2
    total = power.sum()
    if total == 0:
        return 0.0
    cumulative = np.cumsum(power)
    idx = int(np.searchsorted(cumulative, fraction * total))
    return float(freqs[min(idx, freqs.size - 1)])


def _contrast_band_edges(fs: float, n_bands: int) -> np.ndarray:
    nyquist = fs / 2.0
    edges = [0.0] + [nyquist / 2 ** (n_bands - k) for k in range(1, n_bands + 1)]
    return np.array(edges)


def spectral_contrast(window, fs: float, n_bands: int = 5, alpha: float = 0.02) -> np.ndarray:
    """Per-band log difference between the strongest and weakest spectral magnitudes.

    Bands are octave-spaced covering (0, fs/2]. Within each band the top and
    bottom ``alpha`` fraction of magnitudes (at least one bin) are averaged;
    contrast is log(peak) - log(valley). Flat spectra give 0 in every band.
    """
    if n_bands < 1:
        raise InvalidParameterError("need at least one contrast band")
    x = _as_samples(window)
    mag, freqs = _magnitude_spectrum(x, fs)
    edges = _contrast_band_edges(fs, n_bands)
    eps = 1e-12
    contrast = np.zeros(n_bands)
    for k in range(n_bands):
        hi_inclusive = k == n_bands - 1
        in_band = (freqs >= edges[k]) & ((freqs <= edges[k + 1]) if hi_inclusive else (freqs < edges[k + 1]))
        band = np.sort(mag[in_band])[::-1]
        if band.size == 0:
            continue
        m = max(1, int(round(alpha * band.size)))
        peak = np.mean(band[:m])
        valley = np.mean(band[-m:])
        contrast[k] = np.log(peak + eps) - np.log(valley + eps)
    return contrast


def poly_features(window, fs: float, order: int = 3) -> np.ndarray:
    """Least-squares polynomial fit of the magnitude spectrum; coefficients highest first."""
    x = _as_samples(window)
    mag, freqs = _magnitude_spectrum(x, fs)
    if mag.size < order + 1:
        raise InvalidParameterError(f"need >= {order + 1} spectrum bins for order {order}")
    return np.polyfit(freqs, mag, order)


def amplitude_features(window) -> dict[str, float]:
    """Peak amplitude (pav), valley amplitude (vav = min, even if positive), sum of |x| (auc)."""
    x = _as_samples(window)
    if x.size == 0:
        raise InvalidParameterError("empty window")
    return {
        "pav": float(np.max(x)),
        "vav": float(np.min(x)),
        "auc": float(np.sum(np.abs(x))),
    }


def statistical_features(window) -> dict[str, float]:
    """Excess kurtosis, adjusted skewness, mean, median, sample std, coefficient of variation.

    Constant windows: kurtosis = skewness = cv = 0. cv is 0 when the mean is 0.
    """
    x = _as_samples(window)
    if x.size < 2:
        raise InvalidParameterError("need at least 2 samples for sample statistics")
    mean = float(np.mean(x))
    std = float(np.std(x, ddof=1))
    if std == 0:
        kurt = skew = 0.0
    else:
        kurt = float(_scipy_stats.kurtosis(x, fisher=True, bias=False))
        skew = float(_scipy_stats.skew(x, bias=False))
    cv = std / mean if mean != 0 else 0.0
    return {
        "kurtosis": kurt,
        "skewness": skew,
        "mean": mean,
        "median": float(np.median(x)),
        "std": std,
        "cv": float(cv),
    }


def dwt_level(x: np.ndarray, family: str = "db4") -> tuple[np.ndarray, np.ndarray]:
    """One level of the discrete wavelet transform: (approximation, detail).

    Symmetric (half-sample) boundary extension; coefficients by correlation
    with the decomposition filters, downsampled by two.
    """
    lo = _WAVELETS.get(family)
    if lo is None:
        raise InvalidParameterError(f"unknown wavelet family {family!r}")
    length = lo.size
    hi = (lo[::-1] * (-1.0) ** np.arange(length))  # quadrature mirror of the low-pass
    ext = np.pad(np.asarray(x, dtype=np.float64), length - 1, mode="symmetric")
    approx = np.convolve(ext, lo[::-1], mode="valid")[1::2]
    detail = np.convolve(ext, hi[::-1], mode="valid")[1::2]
    return approx, detail


def wavelet_features(window, family: str = "db4", levels: int = 1) -> list[dict[str, float]]:
    """Mean, std, energy (sum of squares), and entropy of the DWT coefficients per level.

    Level j statistics are computed over the concatenated approximation and
    detail coefficients at depth j; entropy uses the normalized squared
    coefficients (nats), 0 for zero energy.
    """
    x = _as_samples(window)
    if levels < 1:
        raise InvalidParameterError("levels must be >= 1")
    if x.size < 2**levels:
        raise InvalidParameterError(f"window of {x.size} too short for {levels} DWT levels")
    out = []
    approx = x
    for _ in range(levels):
        approx, detail = dwt_level(approx, family)
        coeffs = np.concatenate([approx, detail])
        energy = float(np.sum(coeffs**2))
        if energy == 0:
            entropy = 0.0
        else:
            p = coeffs**2 / energy
            p = p[p > 0]
            entropy = float(-np.sum(p * np.log(p)))
        out.append(
            {
                "mean": float(np.mean(coeffs)),
                "std": float(np.std(coeffs, ddof=1)) if coeffs.size > 1 else 0.0,
                "energy": energy,
                "entropy": entropy,
            }
        )
    return out


@dataclass
class FeatureVector:
    """The 29 canonical features of one window, in FEATURE_NAMES order."""

    values: np.ndarray
    window_start: int = 0
    label: str | None = None
    names: tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (N_FEATURES,):
            raise InvalidParameterError(f"expected {N_FEATURES} features, got {self.values.shape}")
        if not np.all(np.isfinite(self.values)):
            raise InvalidParameterError("feature values must be finite")


def extract_window_features(window: WindowSegment, fs: float | None = None) -> FeatureVector:
    """Compute the full 29-dimension vector for one window."""
    if isinstance(window, WindowSegment):
        x = window.samples
        fs = window.fs
        start = window.start_index
        label = window.label
    else:
        x = np.asarray(window, dtype=np.float64)
        if fs is None:
            raise InvalidParameterError("fs required when passing raw samples")
        start = 0
        label = None
    stats = statistical_features(x)
    amps = amplitude_features(x)
    wave = wavelet_features(x)[0]
    values = np.concatenate(
        [
            [zcr(x), short_term_energy(x), energy_entropy(x), spectral_entropy(x, fs)],
            [spectral_centroid(x, fs), spectral_bandwidth(x, fs), spectral_rolloff(x, fs)],
            spectral_contrast(x, fs),
            poly_features(x, fs),
            [amps["pav"], amps["vav"], amps["auc"]],
            [stats["kurtosis"], stats["skewness"], stats["mean"], stats["median"], stats["std"], stats["cv"]],
            [wave["mean"], wave["std"], wave["energy"], wave["entropy"]],
        ]
    )
    return FeatureVector(values=values, window_start=start, label=label)


@dataclass
class StackedFeature:
    """Three consecutive windows' features: 3x29 grid plus its 87-dim flattening."""

    grid: np.ndarray
    label: str | None
    session: str

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=np.float64)
        if self.grid.shape != (CONTEXT_WINDOWS, N_FEATURES):
            raise InvalidParameterError(f"grid must be {CONTEXT_WINDOWS}x{N_FEATURES}")

    @property
    def flat(self) -> np.ndarray:
        return self.grid.reshape(-1)


def stack_context(features: list[FeatureVector], session: str, labels: list[str] | None = None) -> list[StackedFeature]:
    """Combine each run of three consecutive windows into one stacked sample.

    Sample i spans windows (i, i+1, i+2) and takes the center window's label.
    All inputs must come from one continuous session; callers must not stack
    across session boundaries.
    """
    if len(features) < CONTEXT_WINDOWS:
        raise InvalidParameterError(f"need >= {CONTEXT_WINDOWS} windows to stack, got {len(features)}")
    if labels is None:
        labels = [fv.label for fv in features]
    if len(labels) != len(features):
        raise InvalidParameterError("labels length must match features length")
    out = []
    for i in range(len(features) - CONTEXT_WINDOWS + 1):
        grid = np.stack([features[i + r].values for r in range(CONTEXT_WINDOWS)])
        out.append(StackedFeature(grid=grid, label=labels[i + 1], session=session))
    return out


@dataclass
class NormalizationStats:
    """Train-set mean/std per stacked dimension; zero-variance dims are flagged."""

    mean: np.ndarray
    std: np.ndarray
    zero_variance: np.ndarray = field(default=None)

    def __post_init__(self):
        self.mean = np.asarray(self.mean, dtype=np.float64)
        self.std = np.asarray(self.std, dtype=np.float64)
        if self.zero_variance is None:
            self.zero_variance = self.std == 0
        else:
            self.zero_variance = np.asarray(self.zero_variance, dtype=bool)


def _to_matrix(data) -> np.ndarray:
    if isinstance(data, np.ndarray):
        return np.atleast_2d(np.asarray(data, dtype=np.float64))
    return np.stack([sf.flat for sf in data])


def fit_normalization(train) -> NormalizationStats:
    """Per-dimension mean/std from training samples only (std over n, not n-1)."""
    X = _to_matrix(train)
    if X.shape[0] < 2:
        raise InvalidParameterError("need at least 2 training samples to fit normalization")
    return NormalizationStats(mean=X.mean(axis=0), std=X.std(axis=0))


def apply_normalization(stats: NormalizationStats, data) -> np.ndarray:
    """Z-score with the fitted stats; zero-variance dimensions pass through as 0."""
    X = _to_matrix(data)
    safe_std = np.where(stats.zero_variance, 1.0, stats.std)
    out = (X - stats.mean) / safe_std
    out[:, stats.zero_variance] = 0.0
    return out


def invert_normalization(stats: NormalizationStats, X: np.ndarray) -> np.ndarray:
    """Undo apply_normalization (zero-variance dims recover the stored mean)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    safe_std = np.where(stats.zero_variance, 0.0, stats.std)
    return X * safe_std + stats.mean
