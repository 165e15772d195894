"""Synthetic per-activity signal generation for benchmarks and live demos.

Each activity gets a distinct signature along several independent axes: tone
stack (band position and harmonic structure), noise floor level, noise color
(one-pole low-pass cutoff), and amplitude modulation (within-window energy
lumpiness), with blinking adding a train of smooth large bumps over a quiet
baseline.  Sessions differ by seeded jitter in frequency, amplitude, phase,
and blink cadence so cross-session evaluation is non-trivial.  Optional
percussive contamination injects short transients (broadband clicks and
damped tone bursts) that harmonic filtering should remove.
"""
from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np
from scipy import signal as _signal

from .errors import InvalidParameterError
from .learn.dataset import ACTIVITIES
from .trace import SignalTrace

DEFAULT_FS = 500.0


@dataclass(frozen=True)
class ActivitySignature:
    """Tone stack (freq, amp pairs), noise floor/color, and optional blink bumps.

    noise_cutoff_hz colors the floor with a one-pole low-pass (None = white);
    the colored noise is rescaled to unit variance so noise_amp keeps its
    meaning regardless of color.  am_freq_hz/am_depth impose a sinusoidal
    amplitude envelope on the whole base (tones and noise together), giving
    the activity a characteristic energy lumpiness within each analysis
    window.  Blink bumps are Hann-windowed oscillatory bursts (blink_freq_hz)
    rather than unipolar pulses: the oscillation keeps their energy above the
    high-pass cutoff and leaves a robust peak after harmonic filtering.
    """

    tones: tuple[tuple[float, float], ...]
    noise_amp: float
    noise_cutoff_hz: float | None = None
    am_freq_hz: float = 0.0
    am_depth: float = 0.0
    blink_rate_hz: float = 0.0
    blink_width_s: float = 0.0
    blink_amp: float = 0.0
    blink_freq_hz: float = 3.2


# Tone frequencies above ~15 Hz sit at half-bin offsets (x.5 for the 1 Hz bins of
# a one-second FFT) and the per-session frequency jitter is kept narrow, so every
# session renders the same leakage regime; a tone drifting onto an exact bin would
# sharpen its spectral peak enough to bifurcate sessions into two feature modes.
# Low tones (5, 10 Hz) stay integer so each analysis window spans whole cycles.
_SIGNATURES: dict[str, ActivitySignature] = {
    "blink": ActivitySignature(tones=(), noise_amp=0.18, noise_cutoff_hz=55.0,
                               blink_rate_hz=1.0, blink_width_s=0.45, blink_amp=12.0),
    "eyebrows_up": ActivitySignature(tones=((21.4, 0.8), (23.5, 0.8), (25.6, 0.6)),
                                     noise_amp=0.35, noise_cutoff_hz=180.0,
                                     am_freq_hz=2.0, am_depth=0.25),
    "frowning": ActivitySignature(tones=((42.5, 1.0), (56.5, 0.45)), noise_amp=0.22,
                                  am_freq_hz=3.0, am_depth=0.55),
    "left_eye_closed": ActivitySignature(tones=((5.0, 1.0),), noise_amp=0.12,
                                         noise_cutoff_hz=30.0),
    "normal_glance": ActivitySignature(tones=(), noise_amp=0.2, noise_cutoff_hz=60.0),
    "right_eye_closed": ActivitySignature(tones=((10.0, 1.0), (70.5, 0.4)),
                                          noise_amp=0.45, noise_cutoff_hz=90.0,
                                          am_freq_hz=4.0, am_depth=0.5),
}


def _stable_key(text: str) -> int:
    return zlib.crc32(text.encode("utf-8"))


@dataclass(frozen=True)
class SessionJitter:
    """Per-session rendering parameters drawn once from the session seed."""

    freq_scale: float
    amp_scale: float
    noise_scale: float
    phases: tuple[float, ...]
    rate_scale: float


def _session_jitter(seed: int, session: str, activity: str) -> SessionJitter:
    rng = np.random.default_rng(
        np.random.SeedSequence([seed, _stable_key(session), _stable_key(activity)]))
    return SessionJitter(
        freq_scale=float(rng.uniform(0.9975, 1.0025)),
        amp_scale=float(rng.uniform(0.8, 1.2)),
        noise_scale=float(rng.uniform(0.8, 1.2)),
        phases=tuple(rng.uniform(0, 2 * np.pi, 8).tolist()),
        rate_scale=float(rng.uniform(0.95, 1.05)),
    )


def _blink_bump(width_samples: int, freq_hz: float, fs: float) -> np.ndarray:
    """Hann-windowed oscillatory burst, the shape of one blink deflection."""
    t = np.arange(width_samples) / fs
    return np.hanning(width_samples + 2)[1:-1] * np.sin(2 * np.pi * freq_hz * t)


class _BlinkSchedule:
    """Deterministic bump-center positions on an absolute sample clock.

    Centers are strictly periodic within a session (cadence varies only
    across sessions, through rate_scale), so every analysis window carries a
    comparable bump load.
    """

    def __init__(self, signature: ActivitySignature, jitter: SessionJitter,
                 fs: float, rng: np.random.Generator):
        self._period = fs / (signature.blink_rate_hz * jitter.rate_scale)
        self._offset = (0.3 + 0.4 * rng.random()) * self._period

    def centers_below(self, limit: float) -> list[float]:
        count = max(0, int(np.ceil((limit - self._offset) / self._period)))
        return [self._offset + i * self._period for i in range(count)]


def _add_bumps(x: np.ndarray, signature: ActivitySignature, jitter: SessionJitter,
               fs: float, schedule: _BlinkSchedule, start_sample: int) -> None:
    """Add every scheduled bump overlapping [start_sample, start_sample+len)."""
    n = x.size
    width = max(8, int(round(signature.blink_width_s * fs)))
    bump = signature.blink_amp * jitter.amp_scale * _blink_bump(
        width, signature.blink_freq_hz, fs)
    for center in schedule.centers_below(start_sample + n + width):
        first = int(round(center)) - width // 2 - start_sample
        lo, hi = max(first, 0), min(first + width, n)
        if hi > lo:
            x[lo:hi] += bump[lo - first:hi - first]


def _colored_noise(white: np.ndarray, signature: ActivitySignature, fs: float,
                   state: float) -> tuple[np.ndarray, float]:
    """Color unit white noise with a one-pole low-pass, rescaled to unit variance.

    The returned state (last unscaled filter output) lets chunked rendering
    continue seamlessly across chunk boundaries.
    """
    if signature.noise_cutoff_hz is None:
        return white, state
    alpha = 1.0 - np.exp(-2.0 * np.pi * signature.noise_cutoff_hz / fs)
    y, zf = _signal.lfilter([alpha], [1.0, alpha - 1.0], white, zi=[(1.0 - alpha) * state])
    gain = np.sqrt((1.0 - (1.0 - alpha) ** 2)) / alpha
    return gain * y, float(y[-1]) if y.size else state


def _render_base(signature: ActivitySignature, jitter: SessionJitter, n: int,
                 fs: float, noise_rng: np.random.Generator,
                 start_sample: int = 0,
                 noise_state: float = 0.0) -> tuple[np.ndarray, float]:
    t = (start_sample + np.arange(n)) / fs
    x = np.zeros(n)
    for i, (freq, amp) in enumerate(signature.tones):
        phase = jitter.phases[i % len(jitter.phases)]
        x += amp * jitter.amp_scale * np.sin(2 * np.pi * freq * jitter.freq_scale * t + phase)
    noise, noise_state = _colored_noise(noise_rng.standard_normal(n), signature,
                                        fs, noise_state)
    x += signature.noise_amp * jitter.noise_scale * noise
    if signature.am_depth > 0:
        carrier = 1.0 + signature.am_depth * np.sin(
            2 * np.pi * signature.am_freq_hz * jitter.freq_scale * t + jitter.phases[-1])
        x *= carrier
    return x, noise_state


def _contaminate(x: np.ndarray, rate_hz: float, fs: float,
                 rng: np.random.Generator) -> np.ndarray:
    """Add short transient artifacts: broadband clicks and damped tone bursts.

    Both kinds are far shorter than the harmonic median-filter span, so they
    register as percussive (vertical-ridge) spectrogram energy. Amplitudes sit
    mostly below the blink-correction threshold so the transients are not
    removable as blink peaks; tone bursts additionally land in arbitrary
    frequency bands, which is what makes them damaging when no
    harmonic/percussive separation is applied.
    """
    if rate_hz <= 0:
        return x
    n = x.size
    count = rng.poisson(rate_hz * n / fs)
    out = x.copy()
    for _ in range(count):
        pos = int(rng.integers(0, n))
        amp = rng.uniform(2.5, 4.5) * rng.choice([-1.0, 1.0])
        if rng.random() < 0.3:
            width = int(rng.integers(2, 9))
            out[pos:pos + width] += amp
        else:
            width = int(rng.integers(20, 61))
            freq = rng.uniform(15.0, 65.0)
            t = np.arange(min(width, n - pos)) / fs
            burst = np.sin(2 * np.pi * freq * t + rng.uniform(0, 2 * np.pi))
            out[pos:pos + t.size] += amp * np.hanning(width)[: t.size] * burst
    return out


def activity_signal(activity: str, duration_s: float, fs: float = DEFAULT_FS,
                    seed: int = 0, session: str = "s0",
                    contamination_hz: float = 0.0) -> SignalTrace:
    """Render one activity recording with per-session seeded jitter."""
    if activity not in _SIGNATURES:
        raise InvalidParameterError(f"unknown activity {activity!r}")
    if duration_s <= 0:
        raise InvalidParameterError("duration must be positive")
    n = int(round(duration_s * fs))
    signature = _SIGNATURES[activity]
    jitter = _session_jitter(seed, session, activity)
    rng = np.random.default_rng(
        np.random.SeedSequence([seed + 1, _stable_key(session), _stable_key(activity)]))
    x, _ = _render_base(signature, jitter, n, fs, rng)
    if signature.blink_rate_hz > 0:
        schedule = _BlinkSchedule(signature, jitter, fs, rng)
        _add_bumps(x, signature, jitter, fs, schedule, start_sample=0)
    x = _contaminate(x, contamination_hz, fs, rng)
    return SignalTrace(samples=x, fs=fs, meta={
        "activity": activity, "session": session, "subject": session,
        "synthetic": True, "seed": seed, "contamination_hz": contamination_hz,
    })


def benchmark_recordings(n_sessions: int = 6, duration_s: float = 40.0,
                         fs: float = DEFAULT_FS, seed: int = 0,
                         contamination_hz: float = 0.0) -> list[SignalTrace]:
    """The full synthetic benchmark: every session x activity combination."""
    if n_sessions < 1:
        raise InvalidParameterError("need at least one session")
    traces = []
    for s in range(n_sessions):
        session = f"s{s}"
        for activity in ACTIVITIES:
            traces.append(activity_signal(activity, duration_s, fs=fs, seed=seed,
                                          session=session,
                                          contamination_hz=contamination_hz))
    return traces


class SyntheticStream:
    """Continuous sample source whose activity can be switched live.

    Samples share one absolute clock: switching activity changes the
    signature from the next sample on without resetting time, so downstream
    windowing sees one unbroken stream.  Blink bumps follow their own
    deterministic schedule and span chunk boundaries cleanly.  The stream is
    reproducible for a fixed seed and switch history.
    """

    def __init__(self, fs: float = DEFAULT_FS, seed: int = 0,
                 activity: str = "normal_glance", session: str = "live",
                 contamination_hz: float = 0.0):
        if activity not in _SIGNATURES:
            raise InvalidParameterError(f"unknown activity {activity!r}")
        self.fs = fs
        self.seed = seed
        self.session = session
        self.contamination_hz = contamination_hz
        self._activity = activity
        self._clock = 0
        self._noise_rng = np.random.default_rng(
            np.random.SeedSequence([seed, _stable_key(session), 1]))
        self._blink_rng = np.random.default_rng(
            np.random.SeedSequence([seed, _stable_key(session), 2]))
        self._schedule: _BlinkSchedule | None = None
        self._noise_state = 0.0

    @property
    def activity(self) -> str:
        return self._activity

    def set_activity(self, activity: str) -> None:
        if activity not in _SIGNATURES:
            raise InvalidParameterError(f"unknown activity {activity!r}")
        self._activity = activity

    def take(self, n: int) -> np.ndarray:
        """Produce the next n samples of the stream."""
        signature = _SIGNATURES[self._activity]
        jitter = _session_jitter(self.seed, self.session, self._activity)
        x, self._noise_state = _render_base(signature, jitter, n, self.fs,
                                            self._noise_rng,
                                            start_sample=self._clock,
                                            noise_state=self._noise_state)
        if signature.blink_rate_hz > 0:
            if self._schedule is None:
                self._schedule = _BlinkSchedule(signature, jitter, self.fs, self._blink_rng)
            _add_bumps(x, signature, jitter, self.fs, self._schedule, self._clock)
        x = _contaminate(x, self.contamination_hz, self.fs, self._noise_rng)
        self._clock += n
        return x
