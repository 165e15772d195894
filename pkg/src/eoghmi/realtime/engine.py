"""Streaming inference: preprocessing, windowing, and per-window prediction.

The offline pipeline filters whole recordings with zero-phase filters and
normalizes against whole-trace statistics; a live stream has neither a whole
trace nor a future to look at.  The engine therefore runs the notch and
high-pass stages as causal filters with persistent state and computes the
robust z-score against a rolling context of recent samples.  Harmonic
filtering and blink correction stay window-local inside the rule-based
predictor.  A stream gap resets all state so no window ever spans missing
samples.
"""
from __future__ import annotations

import time

import numpy as np
from scipy import signal as _signal

from ..dsp import MAD_SCALE
from ..errors import InvalidParameterError, ServiceNotReadyError
from .predict import PEAK_THRESHOLD, ActivityPrediction, rule_based_predict
from .windower import GapNotice, StreamFrame, StreamingWindower

DEFAULT_CONTEXT_S = 4.0


class _CausalChain:
    """Notch plus high-pass Butterworth run causally with carried filter state."""

    def __init__(self, fs: float, notch_hz: float = 50.0, notch_q: float = 30.0,
                 highpass_hz: float = 2.0, highpass_order: int = 4):
        b, a = _signal.iirnotch(notch_hz, notch_q, fs=fs)
        self._notch = (b, a)
        self._notch_zi = _signal.lfilter_zi(b, a) * 0.0
        self._sos = _signal.butter(highpass_order, highpass_hz, btype="highpass",
                                   fs=fs, output="sos")
        self._sos_zi = _signal.sosfilt_zi(self._sos) * 0.0

    def process(self, chunk: np.ndarray) -> np.ndarray:
        y, self._notch_zi = _signal.lfilter(*self._notch, chunk, zi=self._notch_zi)
        y, self._sos_zi = _signal.sosfilt(self._sos, y, zi=self._sos_zi)
        return y


class InferenceEngine:
    """Turns a stream of raw hop-sized frames into per-window predictions.

    ``model`` is any object with the ``predict_window(samples, t, corrected)``
    contract (a RealtimeClassifier around a trained model, or an instrumented
    stub in tests).
    """

    def __init__(self, model, fs: float = 500.0, window_s: float = 1.0,
                 hop_s: float = 0.5, peak_threshold: float = PEAK_THRESHOLD,
                 context_s: float = DEFAULT_CONTEXT_S):
        if window_s <= 0 or hop_s <= 0 or window_s < hop_s:
            raise InvalidParameterError("need window_s >= hop_s > 0")
        ratio = window_s / hop_s
        if abs(ratio - round(ratio)) > 1e-9:
            raise InvalidParameterError("window_s must be an integer multiple of hop_s")
        if context_s < window_s:
            raise InvalidParameterError("context_s must cover at least one window")
        self.model = model
        self.fs = fs
        self.window_s = window_s
        self.hop_s = hop_s
        self.peak_threshold = peak_threshold
        self._window_samples = int(round(window_s * fs))
        self._context_samples = int(round(context_s * fs))
        self._chain = _CausalChain(fs)
        self._windower = StreamingWindower(fs, window_hops=int(round(ratio)))
        self._context = np.empty(0)

    def reset(self) -> None:
        """Restart as if on a fresh stream: filters, context, and history."""
        self._chain = _CausalChain(self.fs)
        self._windower.reset()
        self._context = np.empty(0)
        if hasattr(self.model, "reset"):
            self.model.reset()

    def push_frame(self, frame: StreamFrame) -> list[ActivityPrediction | GapNotice]:
        """Process one hop chunk; returns predictions/gap notices it completes."""
        if self.model is None:
            raise ServiceNotReadyError("no classifier configured")
        filtered = self._chain.process(frame.samples)
        self._context = np.concatenate([self._context, filtered])[-self._context_samples:]
        events = self._windower.push(
            StreamFrame(seq_no=frame.seq_no, samples=filtered, t_start=frame.t_start))
        out: list[ActivityPrediction | GapNotice] = []
        for event in events:
            if isinstance(event, GapNotice):
                self.reset()
                out.append(event)
                break  # anything batched after the gap used pre-gap state
            started = time.perf_counter()
            zscored = self._robust_window(event.samples)
            prediction = rule_based_predict(zscored, self.model,
                                            peak_threshold=self.peak_threshold,
                                            fs=self.fs, window_end_t=event.t_end)
            out.append(prediction.with_latency((time.perf_counter() - started) * 1e3))
        return out

    def _robust_window(self, window: np.ndarray) -> np.ndarray:
        """Median/MAD-normalize a window against the rolling context."""
        med = float(np.median(self._context))
        mad = float(np.median(np.abs(self._context - med)))
        scale = MAD_SCALE * mad
        if scale <= 0:
            raise ServiceNotReadyError("rolling context is (near-)constant; cannot normalize")
        return (window - med) / scale
