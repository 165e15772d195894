"""Per-window rule-based prediction with the dual-pass voluntary-blink check.

A preprocessed window is first harmonic-filtered.  If any sample of the
harmonic part exceeds the peak threshold, the window is classified twice —
once after blink-artifact correction and once without it — and the blink is
deemed voluntary only when both passes agree on the blink class.  Without a
threshold peak a single classification is made and no correction pass runs.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from ..blink import DEFAULT_THRESHOLD, correct_blink_artifacts
from ..errors import InvalidParameterError, ServiceNotReadyError
from ..hpss import harmonic_filter_time
from ..learn.dataset import ACTIVITIES
from ..trace import SignalTrace

PEAK_THRESHOLD = DEFAULT_THRESHOLD


@dataclass(frozen=True)
class ActivityPrediction:
    """One window's classification outcome plus processing latency."""

    window_end_t: float
    activity: str
    voluntary_blink: bool
    scores: np.ndarray  # probabilities in ACTIVITIES order, sum 1
    latency_ms: float

    def __post_init__(self):
        object.__setattr__(self, "scores", np.asarray(self.scores, dtype=np.float64))
        if self.scores.shape != (len(ACTIVITIES),):
            raise InvalidParameterError(
                f"scores must have {len(ACTIVITIES)} entries, got {self.scores.shape}")
        if abs(float(self.scores.sum()) - 1.0) > 1e-6:
            raise InvalidParameterError("scores must sum to 1")
        if self.activity not in ACTIVITIES:
            raise InvalidParameterError(f"unknown activity {self.activity!r}")
        if self.voluntary_blink and self.activity != "blink":
            raise InvalidParameterError("voluntary_blink requires the blink class")

    def with_latency(self, latency_ms: float) -> "ActivityPrediction":
        return replace(self, latency_ms=float(latency_ms))


def rule_based_predict(window, model, peak_threshold: float = PEAK_THRESHOLD,
                       fs: float = 500.0, window_end_t: float = 0.0) -> ActivityPrediction:
    """Classify one preprocessed window following the voluntary-blink rule.

    ``model`` must expose ``predict_window(samples, t, corrected) ->
    (activity, scores)`` where scores are probabilities in ACTIVITIES order.
    The correction pass executes only when the harmonic-filtered window
    actually exceeds the threshold, which instrumented stubs can verify by
    call count.
    """
    if model is None:
        raise ServiceNotReadyError("no classifier configured")
    started = time.perf_counter()
    trace = SignalTrace(samples=np.asarray(window, dtype=np.float64), fs=fs,
                        meta={"origin": "realtime"})
    harmonic = harmonic_filter_time(trace)
    has_peak = bool(np.max(np.abs(harmonic.samples)) > peak_threshold)
    if has_peak:
        corrected = correct_blink_artifacts(harmonic, threshold=peak_threshold)
        act_corr, scores_corr = model.predict_window(corrected.samples, window_end_t, True)
        act_raw, _ = model.predict_window(harmonic.samples, window_end_t, False)
        voluntary = act_corr == "blink" and act_raw == "blink"
        activity, scores = act_corr, scores_corr
    else:
        activity, scores = model.predict_window(harmonic.samples, window_end_t, False)
        voluntary = False
    latency_ms = (time.perf_counter() - started) * 1e3
    return ActivityPrediction(window_end_t=window_end_t, activity=activity,
                              voluntary_blink=voluntary, scores=scores,
                              latency_ms=latency_ms)
