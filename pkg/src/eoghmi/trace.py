"""Core signal containers: uniformly sampled traces and fixed-length windows."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError


@dataclass
class SignalTrace:
    """A uniformly sampled 1-D signal with its sampling rate and provenance metadata.

    ``meta`` carries free-form provenance strings (subject, activity, session,
    processing-stage flags). Samples are stored as float64 and validated to be
    finite on construction.
    """

    samples: np.ndarray
    fs: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise InvalidParameterError("trace samples must be 1-D")
        if self.samples.size < 1:
            raise InvalidParameterError("trace must contain at least one sample")
        if self.fs <= 0:
            raise InvalidParameterError(f"sampling rate must be positive, got {self.fs}")
        if not np.all(np.isfinite(self.samples)):
            raise InvalidParameterError("trace samples must be finite")

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.fs

    def replace(self, samples: np.ndarray, **meta_updates) -> "SignalTrace":
        """New trace with the same fs and merged metadata."""
        meta = dict(self.meta)
        meta.update(meta_updates)
        return SignalTrace(samples=np.asarray(samples, dtype=np.float64), fs=self.fs, meta=meta)


@dataclass
class WindowSegment:
    """A fixed-length slice of a trace, tagged with its source offset and label."""

    samples: np.ndarray
    start_index: int
    fs: float
    label: str | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)

    def __len__(self) -> int:
        return self.samples.size
