"""Shared fixtures: deterministic signal builders used across the suite."""
import numpy as np
import pytest

from eoghmi.trace import SignalTrace

FS = 500.0


def make_trace(samples, fs=FS, **meta) -> SignalTrace:
    return SignalTrace(samples=np.asarray(samples, dtype=np.float64), fs=fs, meta=meta)


def tone(freq_hz, duration_s=4.0, fs=FS, amp=1.0, phase=0.0) -> np.ndarray:
    t = np.arange(int(round(duration_s * fs))) / fs
    return amp * np.sin(2 * np.pi * freq_hz * t + phase)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
