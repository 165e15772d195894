"""Assembly of fixed-size analysis windows from a stream of sample chunks.

Frames arrive as hop-sized chunks with monotonically increasing sequence
numbers.  A window spans a fixed number of consecutive hops and a new window
is emitted at every hop once enough contiguous history exists.  A sequence
discontinuity invalidates all windows that would span the gap: the buffer is
dropped, a gap notice is emitted, and assembly restarts from the next frame.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..errors import InvalidParameterError


@dataclass(frozen=True)
class StreamFrame:
    """One hop-sized chunk of samples on a monotone sequence counter."""

    seq_no: int
    samples: np.ndarray
    t_start: float

    def __post_init__(self):
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=np.float64))


@dataclass(frozen=True)
class WindowEvent:
    """A complete analysis window ending at t_end seconds."""

    samples: np.ndarray
    t_end: float
    seq_no: int  # sequence number of the newest frame in the window
    valid: bool = True


@dataclass(frozen=True)
class GapNotice:
    """A sequence discontinuity: frames [expected, received) never arrived."""

    expected_seq: int
    received_seq: int
    t: float


class StreamingWindower:
    """Stateful window assembler; one instance per ingest stream."""

    def __init__(self, fs: float, window_hops: int = 2):
        if fs <= 0:
            raise InvalidParameterError("fs must be positive")
        if window_hops < 1:
            raise InvalidParameterError("window_hops must be at least 1")
        self.fs = fs
        self.window_hops = window_hops
        self._chunks: deque[StreamFrame] = deque(maxlen=window_hops)
        self._next_seq: int | None = None
        self._chunk_size: int | None = None

    def push(self, frame: StreamFrame) -> list[WindowEvent | GapNotice]:
        """Feed one frame; return any window completed by it, or a gap notice."""
        out: list[WindowEvent | GapNotice] = []
        if self._chunk_size is None:
            self._chunk_size = frame.samples.size
        elif frame.samples.size != self._chunk_size:
            raise InvalidParameterError(
                f"chunk size changed mid-stream ({frame.samples.size} != {self._chunk_size})")
        if self._next_seq is not None and frame.seq_no != self._next_seq:
            out.append(GapNotice(expected_seq=self._next_seq,
                                 received_seq=frame.seq_no, t=frame.t_start))
            self._chunks.clear()
        self._next_seq = frame.seq_no + 1
        self._chunks.append(frame)
        if len(self._chunks) == self.window_hops:
            samples = np.concatenate([c.samples for c in self._chunks])
            t_end = frame.t_start + frame.samples.size / self.fs
            out.append(WindowEvent(samples=samples, t_end=t_end, seq_no=frame.seq_no))
        return out

    def reset(self) -> None:
        self._chunks.clear()
        self._next_seq = None


def streaming_windower(frames, fs: float, window_hops: int = 2):
    """Generator form: yields WindowEvent and GapNotice items for a frame iterable."""
    w = StreamingWindower(fs, window_hops=window_hops)
    for frame in frames:
        yield from w.push(frame)
