"""Adapter turning a trained offline classifier into a realtime window model.

The offline models consume stacked features: three consecutive windows'
29-dimension vectors flattened to 87.  This adapter keeps a short feature
history per stream so each incoming window can be classified in its context.
For the dual-pass blink rule it tracks both feature variants per window; a
window without threshold peaks is its own corrected version (correction only
rewrites above-threshold regions), so the corrected history never diverges
silently from the raw one.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParameterError
from ..features import CONTEXT_WINDOWS, extract_window_features
from ..learn.dataset import ACTIVITIES
from ..learn.models import TrainedModel, predict_proba


@dataclass
class _WindowSlot:
    t: float
    raw: np.ndarray | None = None
    corrected: np.ndarray | None = None

    def variant(self, corrected: bool) -> np.ndarray:
        if corrected:
            return self.corrected if self.corrected is not None else self.raw
        return self.raw if self.raw is not None else self.corrected


class RealtimeClassifier:
    """Stateful wrapper satisfying the rule-based predictor's model contract."""

    def __init__(self, model: TrainedModel, fs: float = 500.0):
        if model is None:
            raise InvalidParameterError("model must be a TrainedModel")
        self.model = model
        self.fs = fs
        self._slots: list[_WindowSlot] = []

    def reset(self) -> None:
        """Drop feature history (e.g. after a stream gap)."""
        self._slots.clear()

    def predict_window(self, samples, t: float, corrected: bool):
        """Classify one window variant; returns (activity, scores in ACTIVITIES order)."""
        feats = extract_window_features(np.asarray(samples, dtype=np.float64),
                                        fs=self.fs).values
        if not self._slots or self._slots[-1].t < t:
            self._slots.append(_WindowSlot(t=t))
            del self._slots[:-CONTEXT_WINDOWS]
        slot = self._slots[-1]
        if corrected:
            slot.corrected = feats
        else:
            slot.raw = feats
        context = [s.variant(corrected) for s in self._slots]
        while len(context) < CONTEXT_WINDOWS:  # warm-up: replicate the oldest window
            context.insert(0, context[0])
        x = np.concatenate(context)[None, :]
        classes, proba = predict_proba(self.model, x)
        row = proba[0]
        activity = str(classes[int(np.argmax(row))])
        scores = np.zeros(len(ACTIVITIES))
        for cls, p in zip(classes.tolist(), row.tolist()):
            if cls in ACTIVITIES:
                scores[ACTIVITIES.index(cls)] = p
        total = scores.sum()
        if total <= 0:
            raise InvalidParameterError("classifier produced no mass on known activities")
        return activity, scores / total
