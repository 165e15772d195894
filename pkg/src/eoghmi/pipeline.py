"""End-to-end orchestration: raw trace -> cleaned trace -> labeled features."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import blink, dsp
from .errors import InvalidParameterError
from .features import FEATURE_SCHEMA_VERSION, extract_window_features, stack_context
from .hpss import HpssParams, harmonic_filter_time
from .learn.dataset import LabeledDataset
from .trace import SignalTrace

MAINS_HZ = 50.0
HIGHPASS_HZ = 2.0


@dataclass
class PipelineConfig:
    """Knobs for the preprocessing and featurization stages.

    Validated up front so a batch run fails before touching any file.
    """

    window_s: float = 1.0
    hop_s: float = 0.5
    mains_hz: float = MAINS_HZ
    highpass_hz: float = HIGHPASS_HZ
    use_hpss: bool = True
    hpss_harmonic_len: int = 17
    hpss_percussive_len: int = 17
    use_blink_correction: bool = True
    blink_threshold: float = blink.DEFAULT_THRESHOLD
    blink_min_distance_ms: float = blink.DEFAULT_MIN_DISTANCE_MS
    seed: int = 0
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.window_s <= 0 or self.hop_s <= 0:
            raise InvalidParameterError("window_s and hop_s must be positive")
        if self.hop_s > self.window_s:
            raise InvalidParameterError("hop_s cannot exceed window_s")
        if self.mains_hz <= 0 or self.highpass_hz <= 0:
            raise InvalidParameterError("filter frequencies must be positive")
        if self.hpss_harmonic_len < 1 or self.hpss_percussive_len < 1:
            raise InvalidParameterError("HPSS median lengths must be >= 1")
        if self.blink_threshold <= 0:
            raise InvalidParameterError("blink threshold must be positive")

    @property
    def hpss_params(self) -> HpssParams:
        return HpssParams(l_harm=self.hpss_harmonic_len,
                          l_perc=self.hpss_percussive_len)

    def to_dict(self) -> dict:
        return {
            "window_s": self.window_s,
            "hop_s": self.hop_s,
            "mains_hz": self.mains_hz,
            "highpass_hz": self.highpass_hz,
            "use_hpss": self.use_hpss,
            "hpss_harmonic_len": self.hpss_harmonic_len,
            "hpss_percussive_len": self.hpss_percussive_len,
            "use_blink_correction": self.use_blink_correction,
            "blink_threshold": self.blink_threshold,
            "blink_min_distance_ms": self.blink_min_distance_ms,
            "seed": self.seed,
            "feature_schema": FEATURE_SCHEMA_VERSION,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        known = {f for f in cls.__dataclass_fields__ if f != "extras"}
        kwargs = {k: v for k, v in d.items() if k in known}
        extras = {k: v for k, v in d.items()
                  if k not in known and k != "feature_schema"}
        return cls(**kwargs, extras=extras)

    def replace(self, **changes) -> "PipelineConfig":
        return replace(self, **changes)


def preprocess_trace(trace: SignalTrace, config: PipelineConfig | None = None) -> SignalTrace:
    """Run the cleaning chain: notch, high-pass, robust z-score, harmonic
    filtering, blink correction.  Stage flags accumulate in the metadata."""
    config = config or PipelineConfig()
    out = dsp.notch_filter(trace, config.mains_hz)
    out = dsp.highpass_filter(out, config.highpass_hz)
    out = dsp.robust_zscore(out)
    if config.use_hpss:
        out = harmonic_filter_time(out, config.hpss_params)
    if config.use_blink_correction:
        min_distance = max(1, int(round(config.blink_min_distance_ms * 1e-3 * trace.fs)))
        out = blink.correct_blink_artifacts(out, config.blink_threshold, min_distance)
    return out


def featurize_trace(trace: SignalTrace, config: PipelineConfig | None = None,
                    label: str | None = None, session: str | None = None):
    """Window a cleaned trace and emit context-stacked feature samples."""
    config = config or PipelineConfig()
    label = label or trace.meta.get("activity")
    session = session or trace.meta.get("session", "unknown")
    windows = dsp.segment_windows(trace, config.window_s, config.hop_s)
    feats = [extract_window_features(w) for w in windows]
    labels = [label] * len(feats) if label is not None else None
    return stack_context(feats, session=session, labels=labels)


def build_dataset(traces, config: PipelineConfig | None = None,
                  preprocess: bool = True) -> LabeledDataset:
    """Preprocess + featurize a batch of labeled traces into one dataset.

    Each trace must carry ``activity`` and ``session`` metadata.  Traces are
    processed in the given order; rows follow trace order then window order.
    """
    config = config or PipelineConfig()
    X, y, sessions = [], [], []
    for trace in traces:
        activity = trace.meta.get("activity")
        session = trace.meta.get("session")
        if activity is None or session is None:
            raise InvalidParameterError("trace metadata must include activity and session")
        cleaned = preprocess_trace(trace, config) if preprocess else trace
        for stacked in featurize_trace(cleaned, config, label=activity, session=session):
            X.append(stacked.flat)
            y.append(activity)
            sessions.append(session)
    if not X:
        raise InvalidParameterError("no feature rows produced (traces too short?)")
    return LabeledDataset(X=np.asarray(X), y=np.asarray(y, dtype=object),
                          session=np.asarray(sessions, dtype=object))
