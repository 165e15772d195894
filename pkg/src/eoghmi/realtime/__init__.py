"""Streaming inference: windowing, causal filtering, commands, task, service."""
from .classifier import RealtimeClassifier
from .commands import ACTIVITY_DIRECTIONS, DOUBLE_CLICK_S, CommandMapper, CursorCommand
from .engine import InferenceEngine
from .predict import PEAK_THRESHOLD, ActivityPrediction, rule_based_predict
from .server import PROTOCOL_VERSION, RealtimeServer, ServeConfig, serve
from .sources import ReplaySource, SyntheticSource, paced
from .task import BUTTONS, TaskEngine, TaskState, replay_commands
from .windower import GapNotice, StreamFrame, StreamingWindower, WindowEvent, streaming_windower

__all__ = [
    "ACTIVITY_DIRECTIONS",
    "ActivityPrediction",
    "BUTTONS",
    "CommandMapper",
    "CursorCommand",
    "DOUBLE_CLICK_S",
    "GapNotice",
    "InferenceEngine",
    "PEAK_THRESHOLD",
    "PROTOCOL_VERSION",
    "RealtimeClassifier",
    "RealtimeServer",
    "ReplaySource",
    "ServeConfig",
    "StreamFrame",
    "StreamingWindower",
    "SyntheticSource",
    "TaskEngine",
    "TaskState",
    "WindowEvent",
    "paced",
    "replay_commands",
    "rule_based_predict",
    "serve",
    "streaming_windower",
]
