"""Foundational 1-D signal operations.

All operations are pure: they return new arrays/traces and never mutate their
inputs, so they are safe to call from any number of concurrent workers.
"""
from __future__ import annotations

import numpy as np
from scipy import ndimage, signal

from .errors import DegenerateInputError, InvalidParameterError
from .trace import SignalTrace, WindowSegment

# Consistency constant making the MAD an unbiased scale estimate under normality.
MAD_SCALE = 1.4826


def notch_filter(trace: SignalTrace, f0: float, q: float = 30.0) -> SignalTrace:
    """Remove a narrow band around ``f0`` Hz with a second-order IIR notch.

    Applied forward-backward (zero phase). Attenuation at ``f0`` is >= 30 dB.
    """
    nyquist = trace.fs / 2.0
    if not 0 < f0 < nyquist:
        raise InvalidParameterError(f"notch frequency {f0} Hz outside (0, {nyquist}) Hz")
    if q <= 0:
        raise InvalidParameterError("quality factor must be positive")
    b, a = signal.iirnotch(f0, q, fs=trace.fs)
    out = signal.filtfilt(b, a, trace.samples)
    return trace.replace(out, notch_hz=f0)


def highpass_filter(trace: SignalTrace, cutoff: float, order: int = 4) -> SignalTrace:
    """Butterworth high-pass, forward-backward for zero phase. Rejects DC and drift."""
    nyquist = trace.fs / 2.0
    if not 0 < cutoff < nyquist:
        raise InvalidParameterError(f"cutoff {cutoff} Hz outside (0, {nyquist}) Hz")
    if order < 1:
        raise InvalidParameterError("filter order must be >= 1")
    sos = signal.butter(order, cutoff, btype="highpass", fs=trace.fs, output="sos")
    out = signal.sosfiltfilt(sos, trace.samples)
    return trace.replace(out, highpass_hz=cutoff)


def median_filter_1d(seq: np.ndarray, l: int) -> np.ndarray:
    """Sliding median of odd length ``l`` with replicated boundary values."""
    if l < 1 or l % 2 == 0:
        raise InvalidParameterError(f"median length must be odd and >= 1, got {l}")
    seq = np.asarray(seq, dtype=np.float64)
    if l == 1:
        return seq.copy()
    return ndimage.median_filter(seq, size=l, mode="nearest")


def hilbert_envelope(trace: SignalTrace) -> np.ndarray:
    """Instantaneous amplitude: magnitude of the analytic signal."""
    if len(trace) < 4:
        raise InvalidParameterError("need at least 4 samples for an analytic signal")
    return np.abs(signal.hilbert(trace.samples))


def savgol_smooth(seq: np.ndarray, window: int, poly_order: int) -> np.ndarray:
    """Savitzky-Golay smoothing; reproduces polynomials of degree <= poly_order exactly."""
    if window < 1 or window % 2 == 0:
        raise InvalidParameterError(f"window must be odd and >= 1, got {window}")
    if poly_order >= window:
        raise InvalidParameterError(f"poly_order {poly_order} must be < window {window}")
    seq = np.asarray(seq, dtype=np.float64)
    if seq.size < window:
        raise InvalidParameterError(f"sequence shorter than window ({seq.size} < {window})")
    return signal.savgol_filter(seq, window, poly_order)


def find_peaks(seq: np.ndarray, min_height: float, min_distance: int = 1) -> np.ndarray:
    """Indices of local maxima >= min_height, spaced >= min_distance samples apart.

    When two candidates conflict on distance, the higher one wins.
    """
    if min_distance < 1:
        raise InvalidParameterError("min_distance must be >= 1")
    seq = np.asarray(seq, dtype=np.float64)
    idx, _ = signal.find_peaks(seq, height=min_height, distance=min_distance)
    return idx.astype(np.intp)


def robust_zscore(trace: SignalTrace) -> SignalTrace:
    """Normalize by median and scaled median absolute deviation.

    out = (x - median(x)) / (MAD_SCALE * MAD(x)). Outlier-resistant: the scale
    is set by the bulk of the samples, not the extremes.
    """
    x = trace.samples
    med = np.median(x)
    mad = np.median(np.abs(x - med))
    if mad == 0:
        raise DegenerateInputError("MAD is zero; robust z-score undefined for (near-)constant input")
    out = (x - med) / (MAD_SCALE * mad)
    return trace.replace(out, robust_zscored=True)


def segment_windows(trace: SignalTrace, window_s: float, hop_s: float) -> list[WindowSegment]:
    """Slice a trace into fixed windows at hop offsets 0, hop, 2*hop, ...

    Returns an empty list when the trace is shorter than one window. Each
    segment carries the trace's activity label and metadata.
    """
    win = window_s * trace.fs
    hop = hop_s * trace.fs
    if abs(win - round(win)) > 1e-9 or abs(hop - round(hop)) > 1e-9:
        raise InvalidParameterError("window and hop must be integral numbers of samples")
    win, hop = int(round(win)), int(round(hop))
    if win < 1 or hop < 1:
        raise InvalidParameterError("window and hop must be at least one sample")
    n = len(trace)
    if n < win:
        return []
    count = (n - win) // hop + 1
    label = trace.meta.get("activity")
    return [
        WindowSegment(
            samples=trace.samples[k * hop : k * hop + win].copy(),
            start_index=k * hop,
            fs=trace.fs,
            label=label,
            meta=dict(trace.meta),
        )
        for k in range(count)
    ]
