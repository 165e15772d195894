"""Signal sources feeding the realtime service: replay and live synthesis.

Both sources produce hop-sized StreamFrames on a monotone sequence counter.
Replay walks a stored recording and honors wall-clock pacing through the
``paced`` wrapper (a speed factor shortens the chunk period; timestamps stay
in signal time).  Dropout stretches recorded as NaN runs become gap notices:
the affected chunks are skipped, their sequence numbers are consumed, and
downstream windowing restarts cleanly after the gap.  The synthetic source
wraps the seeded activity generator and can switch activities live.
"""
from __future__ import annotations

import asyncio
import time

import numpy as np

from ..errors import InvalidParameterError
from ..io import load_recording
from ..synth import DEFAULT_FS, SyntheticStream
from ..trace import SignalTrace
from .windower import GapNotice, StreamFrame


class ReplaySource:
    """Replays a recording (or an in-memory trace) as a frame stream."""

    def __init__(self, recording, hop_s: float = 0.5, speed: float = 1.0):
        trace = recording if isinstance(recording, SignalTrace) else load_recording(recording)
        if speed <= 0:
            raise InvalidParameterError("speed must be positive")
        self.trace = trace
        self.fs = trace.fs
        self.hop_s = hop_s
        self.speed = speed
        self._hop = int(round(hop_s * trace.fs))
        if self._hop < 1:
            raise InvalidParameterError("hop too short for the recording's sample rate")

    @property
    def duration_s(self) -> float:
        return len(self.trace) / self.fs

    def frames(self):
        """Iterate hop chunks; NaN-containing chunks turn into one gap notice."""
        x = self.trace.samples
        n_chunks = x.size // self._hop
        in_gap = False
        for k in range(n_chunks):
            chunk = x[k * self._hop:(k + 1) * self._hop]
            t_start = k * self._hop / self.fs
            if not np.all(np.isfinite(chunk)):
                if not in_gap:
                    yield GapNotice(expected_seq=k, received_seq=k + 1, t=t_start)
                    in_gap = True
                continue
            in_gap = False
            yield StreamFrame(seq_no=k, samples=chunk, t_start=t_start)


class SyntheticSource:
    """Endless live stream of the seeded per-activity generator."""

    def __init__(self, activity: str = "normal_glance", fs: float = DEFAULT_FS,
                 hop_s: float = 0.5, seed: int = 0, speed: float = 1.0,
                 session: str = "live", contamination_hz: float = 0.0):
        if speed <= 0:
            raise InvalidParameterError("speed must be positive")
        self.stream = SyntheticStream(fs=fs, seed=seed, activity=activity,
                                      session=session,
                                      contamination_hz=contamination_hz)
        self.fs = fs
        self.hop_s = hop_s
        self.speed = speed
        self._hop = int(round(hop_s * fs))
        self._seq = 0

    @property
    def activity(self) -> str:
        return self.stream.activity

    def set_activity(self, activity: str) -> None:
        self.stream.set_activity(activity)

    def frames(self):
        while True:
            t_start = self._seq * self._hop / self.fs
            yield StreamFrame(seq_no=self._seq, samples=self.stream.take(self._hop),
                              t_start=t_start)
            self._seq += 1


async def paced(source, clock=time.monotonic, sleep=asyncio.sleep):
    """Yield the source's frames at real-time pace (hop_s / speed per chunk).

    Deadlines are absolute, so individual sleep jitter does not accumulate;
    the speed attribute is re-read every chunk and may be changed live.  Gap
    notices pass through immediately without consuming a time slot.
    """
    start = clock()
    elapsed = 0.0
    for item in source.frames():
        if isinstance(item, GapNotice):
            yield item
            continue
        wait = start + elapsed - clock()
        if wait > 0:
            await sleep(wait)
        yield item
        elapsed += source.hop_s / source.speed
