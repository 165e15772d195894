"""Involuntary-blink artifact detection and envelope-insertion correction.

Blink spikes in a robust-z-scored recording stand far outside the interquartile
band of the repetitive activity signal. Each spike region is grown outward from
its peak while samples stay beyond the quartile bound, then replaced with a
Savitzky-Golay envelope of the log-magnitude signal at the same indices, so
the activity-related signal around the artifact is preserved untouched.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dsp
from .errors import InvalidParameterError
from .trace import SignalTrace

DEFAULT_THRESHOLD = 4.0
DEFAULT_MIN_DISTANCE_MS = 100.0
DEFAULT_QUARTILES = (25.0, 75.0)
DEFAULT_ENVELOPE_WINDOW = 251
DEFAULT_ENVELOPE_ORDER = 3
LOG_FLOOR = 1e-8


@dataclass
class QuartileBounds:
    q1: float
    q3: float

    def __post_init__(self):
        if self.q1 > self.q3:
            raise InvalidParameterError(f"q1 {self.q1} exceeds q3 {self.q3}")


@dataclass
class ArtifactRegion:
    """One blink artifact: a peak plus the samples grown around it (inclusive)."""

    peak_index: int
    begin_index: int
    end_index: int
    polarity: str  # "positive" | "negative"

    def __post_init__(self):
        if not self.begin_index <= self.peak_index <= self.end_index:
            raise InvalidParameterError("region must bracket its peak")

    @property
    def indices(self) -> slice:
        return slice(self.begin_index, self.end_index + 1)


def quartile_bounds(samples: np.ndarray, percentiles: tuple[float, float] = DEFAULT_QUARTILES) -> QuartileBounds:
    lo, hi = np.percentile(np.asarray(samples, dtype=np.float64), percentiles)
    return QuartileBounds(q1=float(lo), q3=float(hi))


def _grow_region(x: np.ndarray, peak: int, exceeds) -> tuple[int, int]:
    n = x.size
    b = peak
    while b > 0 and exceeds(x[b]):
        b -= 1
    e = peak
    while e < n - 1 and exceeds(x[e]):
        e += 1
    return b, e


def _merge_regions(regions: list[ArtifactRegion], x: np.ndarray) -> list[ArtifactRegion]:
    if not regions:
        return []
    regions = sorted(regions, key=lambda r: (r.begin_index, r.end_index))
    merged = [regions[0]]
    for region in regions[1:]:
        last = merged[-1]
        if region.begin_index <= last.end_index + 1:
            # Keep the taller peak's identity for the merged region.
            keep = last if abs(x[last.peak_index]) >= abs(x[region.peak_index]) else region
            merged[-1] = ArtifactRegion(
                peak_index=keep.peak_index,
                begin_index=last.begin_index,
                end_index=max(last.end_index, region.end_index),
                polarity=keep.polarity,
            )
        else:
            merged.append(region)
    return merged


def detect_blink_artifacts(
    trace: SignalTrace,
    threshold: float = DEFAULT_THRESHOLD,
    min_distance: int | None = None,
    percentiles: tuple[float, float] = DEFAULT_QUARTILES,
) -> list[ArtifactRegion]:
    """Find blink-artifact regions on a robust-z-scored trace.

    Positive peaks above ``threshold`` and negative peaks below ``-threshold``
    qualify (closer conflicting peaks are suppressed in favor of the taller
    one). Each region grows outward from its peak while samples exceed q3
    (positive) or fall below q1 (negative), then overlapping regions merge.
    """
    if min_distance is None:
        min_distance = max(1, int(round(DEFAULT_MIN_DISTANCE_MS * 1e-3 * trace.fs)))
    x = trace.samples
    bounds = quartile_bounds(x, percentiles)
    regions: list[ArtifactRegion] = []
    for peak in dsp.find_peaks(x, min_height=threshold, min_distance=min_distance):
        b, e = _grow_region(x, int(peak), lambda v: v > bounds.q3)
        regions.append(ArtifactRegion(int(peak), b, e, "positive"))
    for peak in dsp.find_peaks(-x, min_height=threshold, min_distance=min_distance):
        b, e = _grow_region(x, int(peak), lambda v: v < bounds.q1)
        regions.append(ArtifactRegion(int(peak), b, e, "negative"))
    return _merge_regions(regions, x)


def correct_blink_artifacts(
    trace: SignalTrace,
    threshold: float = DEFAULT_THRESHOLD,
    min_distance: int | None = None,
    percentiles: tuple[float, float] = DEFAULT_QUARTILES,
    envelope_window: int = DEFAULT_ENVELOPE_WINDOW,
    envelope_order: int = DEFAULT_ENVELOPE_ORDER,
) -> SignalTrace:
    """Replace detected artifact regions with the smoothed log-magnitude envelope.

    The envelope is a Savitzky-Golay fit of log10|x| (floored at LOG_FLOOR to
    keep zero crossings finite), mapped back through 10**e with the original
    sample signs. Samples outside every region are copied bit-identically.
    """
    regions = detect_blink_artifacts(trace, threshold, min_distance, percentiles)
    out = trace.samples.copy()
    if regions:
        window = min(envelope_window, out.size if out.size % 2 == 1 else out.size - 1)
        work = np.log10(np.maximum(np.abs(trace.samples), LOG_FLOOR))
        envelope = dsp.savgol_smooth(work, window, envelope_order)
        for region in regions:
            sl = region.indices
            sign = np.where(trace.samples[sl] < 0, -1.0, 1.0)
            out[sl] = sign * 10.0 ** envelope[sl]
    return trace.replace(out, blink_corrected=True)
