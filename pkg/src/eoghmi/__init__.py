"""Single-channel EOG human-machine-interface toolkit.

Signal conditioning, harmonic/percussive separation, blink-artifact handling,
windowed feature extraction, statistical analyses, from-scratch classifiers
and clustering, and a realtime WebSocket control loop.
"""

__version__ = "0.1.0"

from .trace import SignalTrace, WindowSegment

__all__ = ["SignalTrace", "WindowSegment", "__version__"]
