"""STFT analysis/synthesis with overlap-add reconstruction."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import signal as _sig

from .errors import InvalidParameterError
from .trace import SignalTrace

DEFAULT_WINDOW_LEN = 256
DEFAULT_HOP = 64


@dataclass
class Spectrogram:
    """Complex STFT frames, shape [n_bins x n_frames], with analysis parameters.

    n_bins = window_len // 2 + 1 (one-sided). The stored window satisfies the
    overlap-add condition for the stored hop, so istft() inverts stft() on the
    interior of the signal.
    """

    frames: np.ndarray
    window_len: int
    hop: int
    fs: float
    window_kind: str = "hann"

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.complex128)
        if self.frames.ndim != 2:
            raise InvalidParameterError("frames must be a 2-D [bins x frames] matrix")
        if self.frames.shape[0] != self.window_len // 2 + 1:
            raise InvalidParameterError(
                f"bin count {self.frames.shape[0]} inconsistent with window_len {self.window_len}"
            )
        if self.hop > self.window_len:
            raise InvalidParameterError("hop must not exceed window length")

    @property
    def n_bins(self) -> int:
        return self.frames.shape[0]

    @property
    def n_frames(self) -> int:
        return self.frames.shape[1]

    @property
    def bin_freqs(self) -> np.ndarray:
        return np.fft.rfftfreq(self.window_len, d=1.0 / self.fs)

    def magnitude(self) -> np.ndarray:
        return np.abs(self.frames)


def _analysis_window(kind: str, length: int) -> np.ndarray:
    if kind != "hann":
        raise InvalidParameterError(f"unsupported window kind {kind!r}")
    # Periodic Hann: constant overlap-add for hop = length / 2^k.
    return _sig.get_window("hann", length, fftbins=True)


def stft(trace: SignalTrace, window_len: int = DEFAULT_WINDOW_LEN, hop: int = DEFAULT_HOP) -> Spectrogram:
    """Short-time Fourier transform with a periodic Hann window, no padding.

    Frames start at offsets 0, hop, 2*hop, ...; the tail that does not fill a
    whole window is dropped.
    """
    if hop < 1 or window_len < 2:
        raise InvalidParameterError("window_len must be >= 2 and hop >= 1")
    if hop > window_len:
        raise InvalidParameterError(f"hop {hop} exceeds window length {window_len}")
    x = trace.samples
    if x.size < window_len:
        raise InvalidParameterError(f"trace length {x.size} shorter than one window {window_len}")
    w = _analysis_window("hann", window_len)
    n_frames = (x.size - window_len) // hop + 1
    offsets = np.arange(n_frames) * hop
    segs = x[offsets[:, None] + np.arange(window_len)] * w
    frames = np.fft.rfft(segs, axis=1).T
    return Spectrogram(frames=frames, window_len=window_len, hop=hop, fs=trace.fs)


def istft(spec: Spectrogram) -> SignalTrace:
    """Inverse STFT by weighted overlap-add.

    Output length is (n_frames - 1) * hop + window_len. Reconstruction is exact
    wherever the summed squared window has full support (the interior,
    excluding half a window at each edge).
    """
    w = _analysis_window(spec.window_kind, spec.window_len)
    segs = np.fft.irfft(spec.frames.T, n=spec.window_len, axis=1)
    length = (spec.n_frames - 1) * spec.hop + spec.window_len
    out = np.zeros(length)
    wsum = np.zeros(length)
    for k in range(spec.n_frames):
        sl = slice(k * spec.hop, k * spec.hop + spec.window_len)
        out[sl] += segs[k] * w
        wsum[sl] += w * w
    nonzero = wsum > 1e-12
    out[nonzero] /= wsum[nonzero]
    return SignalTrace(samples=out, fs=spec.fs)


def interior_slice(window_len: int, total_len: int) -> slice:
    """The region where overlap-add reconstruction is exact: half a window in from each edge."""
    half = window_len // 2
    return slice(half, total_len - half)
