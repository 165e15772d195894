"""Harmonic/percussive source separation by directional median filtering.

Sustained components are continuous along the time axis of a magnitude
spectrogram; transients are continuous along the frequency axis. Median
filtering the magnitude in each direction yields two enhanced spectrograms,
turned into masks that split the complex input. Keeping the harmonic part and
resynthesizing removes spike-like interference from a trace.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import InvalidParameterError
from .spectral import DEFAULT_HOP, DEFAULT_WINDOW_LEN, Spectrogram, istft, stft
from .trace import SignalTrace

DEFAULT_MEDIAN_LEN = 17


@dataclass
class HpssParams:
    """Median lengths (odd, >= 3) and masking mode for the separation."""

    l_harm: int = DEFAULT_MEDIAN_LEN
    l_perc: int = DEFAULT_MEDIAN_LEN
    mask_kind: str = "soft"
    soft_power: float = 2.0

    def __post_init__(self):
        for name, l in (("l_harm", self.l_harm), ("l_perc", self.l_perc)):
            if l < 3 or l % 2 == 0:
                raise InvalidParameterError(f"{name} must be odd and >= 3, got {l}")
        if self.mask_kind not in ("hard", "soft"):
            raise InvalidParameterError(f"mask_kind must be 'hard' or 'soft', got {self.mask_kind!r}")
        if self.soft_power < 1:
            raise InvalidParameterError("soft_power must be >= 1")


@dataclass
class HpssResult:
    harmonic: Spectrogram
    percussive: Spectrogram
    mask_harmonic: np.ndarray
    mask_percussive: np.ndarray


def hpss_masks(magnitude: np.ndarray, params: HpssParams) -> tuple[np.ndarray, np.ndarray]:
    """Compute (harmonic, percussive) masks from a [bins x frames] magnitude matrix.

    Harmonic enhancement medians along the time (frame) axis, percussive along
    the frequency (bin) axis; boundary values are replicated. Masks depend only
    on magnitude ratios, so they are invariant to global amplitude scaling.
    """
    harm = ndimage.median_filter(magnitude, size=(1, params.l_harm), mode="nearest")
    perc = ndimage.median_filter(magnitude, size=(params.l_perc, 1), mode="nearest")
    if params.mask_kind == "hard":
        mask_h = (harm >= perc).astype(np.float64)
        mask_p = 1.0 - mask_h
    else:
        hp = harm**params.soft_power
        pp = perc**params.soft_power
        total = hp + pp
        zero = total == 0
        with np.errstate(invalid="ignore"):
            mask_h = np.where(zero, 0.5, hp / np.where(zero, 1.0, total))
        mask_p = 1.0 - mask_h
    return mask_h, mask_p


def hpss_separate(spec: Spectrogram, params: HpssParams | None = None) -> HpssResult:
    """Split a spectrogram into harmonic and percussive parts.

    Masks are applied to the complex frames, so phase is carried over from the
    input. Hard masks partition every bin to exactly one side; soft masks sum
    to one per bin, so harmonic + percussive frames reconstruct the input.
    """
    params = params or HpssParams()
    if spec.n_frames < params.l_harm:
        raise InvalidParameterError(
            f"need at least l_harm={params.l_harm} frames, got {spec.n_frames}"
        )
    if spec.n_bins < params.l_perc:
        raise InvalidParameterError(
            f"need at least l_perc={params.l_perc} bins, got {spec.n_bins}"
        )
    mask_h, mask_p = hpss_masks(spec.magnitude(), params)
    mk = dict(window_len=spec.window_len, hop=spec.hop, fs=spec.fs, window_kind=spec.window_kind)
    return HpssResult(
        harmonic=Spectrogram(frames=spec.frames * mask_h, **mk),
        percussive=Spectrogram(frames=spec.frames * mask_p, **mk),
        mask_harmonic=mask_h,
        mask_percussive=mask_p,
    )


def harmonic_filter_time(
    trace: SignalTrace,
    params: HpssParams | None = None,
    window_len: int = DEFAULT_WINDOW_LEN,
    hop: int = DEFAULT_HOP,
) -> SignalTrace:
    """Keep only the harmonic part of a trace; output has the input's length.

    The trace is symmetrically padded by one window on each side before
    analysis so the retained region lies entirely in the
    exact-reconstruction interior.
    """
    n = len(trace)
    if n < window_len:
        raise InvalidParameterError(f"trace length {n} shorter than one STFT window {window_len}")
    params = params or HpssParams()
    padded = np.pad(trace.samples, window_len, mode="symmetric")
    spec = stft(SignalTrace(padded, trace.fs), window_len=window_len, hop=hop)
    result = hpss_separate(spec, params)
    recon = istft(result.harmonic).samples
    out = recon[window_len : window_len + n]
    return trace.replace(out, hpss="harmonic")
