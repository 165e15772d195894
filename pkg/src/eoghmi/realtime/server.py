"""WebSocket service broadcasting per-window predictions and task state.

One ingest loop drives the active signal source through the inference
engine, the command mapper, and the task engine; every resulting message is
fanned out to all connected clients in identical order.  Clients steer the
service with small JSON control messages (switching source or synthetic
activity, resetting the score, changing replay speed).  A malformed message
earns an error reply but never a disconnect.

Per-client queues are bounded: when a slow client falls behind, stale task
frames are dropped first and prediction messages are never reordered.
"""
from __future__ import annotations

import asyncio
import json
from collections import deque
from dataclasses import dataclass, field

from ..errors import EogHmiError, InvalidParameterError
from ..learn.dataset import ACTIVITIES
from ..learn.models import load_model
from .classifier import RealtimeClassifier
from .commands import CommandMapper
from .engine import InferenceEngine
from .predict import PEAK_THRESHOLD, ActivityPrediction
from .sources import ReplaySource, SyntheticSource, paced
from .task import TaskEngine
from .windower import GapNotice

PROTOCOL_VERSION = "eoghmi-rt/1"
QUEUE_LIMIT = 256


@dataclass
class ServeConfig:
    """Everything needed to stand up the service."""

    model_path: str
    source: str = "synthetic"  # "synthetic" or "replay:<recording path>"
    host: str = "127.0.0.1"
    port: int = 8765
    fs: float = 500.0
    window_s: float = 1.0
    hop_s: float = 0.5
    peak_threshold: float = PEAK_THRESHOLD
    seed: int = 0
    speed: float = 1.0
    contamination_hz: float = 0.0


class _ClientQueue:
    """Bounded outbox: drops the oldest task frame first when full."""

    def __init__(self, limit: int = QUEUE_LIMIT):
        self._items: deque[str] = deque()
        self._limit = limit
        self._ready = asyncio.Event()

    def put(self, message: str, droppable: bool) -> None:
        if len(self._items) >= self._limit:
            for i, item in enumerate(self._items):
                if '"type": "task"' in item:
                    del self._items[i]
                    break
            # without a droppable frame the queue grows; predictions are never lost
        self._items.append(message)
        self._ready.set()

    async def get(self) -> str:
        while not self._items:
            self._ready.clear()
            await self._ready.wait()
        return self._items.popleft()


def _build_source(spec: str, config: ServeConfig):
    if spec == "synthetic":
        return SyntheticSource(fs=config.fs, hop_s=config.hop_s, seed=config.seed,
                               speed=config.speed,
                               contamination_hz=config.contamination_hz)
    if spec.startswith("replay:"):
        return ReplaySource(spec.split(":", 1)[1], hop_s=config.hop_s,
                            speed=config.speed)
    raise InvalidParameterError(f"unknown source spec {spec!r}")


class RealtimeServer:
    """Service state: source, engine, task, and the connected clients."""

    def __init__(self, config: ServeConfig, model=None):
        self.config = config
        trained = model if model is not None else load_model(config.model_path)
        self.classifier = RealtimeClassifier(trained, fs=config.fs)
        self.engine = InferenceEngine(self.classifier, fs=config.fs,
                                      window_s=config.window_s, hop_s=config.hop_s,
                                      peak_threshold=config.peak_threshold)
        self.mapper = CommandMapper()
        self.task = TaskEngine(seed=config.seed)
        self.source = _build_source(config.source, config)
        self._clients: dict[object, _ClientQueue] = {}
        self._ingest_task: asyncio.Task | None = None
        self._prediction_seq = 0

    # -- message construction ------------------------------------------------

    def _hello_message(self) -> str:
        return json.dumps({
            "type": "hello", "version": PROTOCOL_VERSION, "fs": self.config.fs,
            "window_s": self.config.window_s, "hop_s": self.config.hop_s,
            "activities": list(ACTIVITIES),
        })

    def _prediction_message(self, prediction: ActivityPrediction) -> str:
        msg = json.dumps({
            "type": "prediction", "seq": self._prediction_seq,
            "t": prediction.window_end_t, "activity": prediction.activity,
            "voluntary_blink": prediction.voluntary_blink,
            "scores": [round(float(s), 6) for s in prediction.scores],
            "latency_ms": round(prediction.latency_ms, 3),
        })
        self._prediction_seq += 1
        return msg

    def _task_message(self) -> str:
        state = self.task.state
        return json.dumps({
            "type": "task", "target": state.target_button,
            "cursor": [round(state.cursor[0], 6), round(state.cursor[1], 6)],
            "score": state.score,
        })

    # -- broadcast -----------------------------------------------------------

    def _broadcast(self, message: str, droppable: bool = False) -> None:
        for queue in self._clients.values():
            queue.put(message, droppable)

    def _emit_prediction(self, prediction: ActivityPrediction) -> None:
        self._broadcast(self._prediction_message(prediction))
        command = self.mapper.feed(prediction)
        if command is not None:
            self.task.apply(command)
        self._broadcast(self._task_message(), droppable=True)

    def handle_event(self, event) -> None:
        """Route one engine output (prediction or gap) to clients and the task."""
        if isinstance(event, GapNotice):
            self._broadcast(json.dumps({"type": "gap"}))
        else:
            self._emit_prediction(event)

    # -- ingest --------------------------------------------------------------

    async def _ingest_loop(self) -> None:
        async for item in paced(self.source):
            if isinstance(item, GapNotice):
                self.engine.reset()
                self.mapper.reset()
                self._broadcast(json.dumps({"type": "gap"}))
                continue
            for event in self.engine.push_frame(item):
                self.handle_event(event)

    def start_ingest(self) -> None:
        if self._ingest_task is not None:
            self._ingest_task.cancel()
        self._ingest_task = asyncio.get_running_loop().create_task(self._ingest_loop())

    async def stop_ingest(self) -> None:
        if self._ingest_task is not None:
            self._ingest_task.cancel()
            try:
                await self._ingest_task
            except asyncio.CancelledError:
                pass
            self._ingest_task = None

    # -- control messages ----------------------------------------------------

    async def handle_control(self, payload: dict) -> dict | None:
        action = payload.get("action")
        value = payload.get("value")
        if action == "set_activity":
            if not isinstance(self.source, SyntheticSource):
                return {"type": "error", "message": "set_activity requires the synthetic source"}
            self.source.set_activity(str(value))
            return None
        if action == "set_source":
            new_source = _build_source(str(value), self.config)
            await self.stop_ingest()
            self.source = new_source
            self.engine.reset()
            self.mapper.reset()
            self.start_ingest()
            return None
        if action == "set_speed":
            speed = float(value)
            if speed <= 0:
                raise InvalidParameterError("speed must be positive")
            self.source.speed = speed
            return None
        if action == "reset":
            self.task.reset()
            self._broadcast(self._task_message(), droppable=True)
            return None
        return {"type": "error", "message": f"unknown control action {action!r}"}

    # -- connection handling -------------------------------------------------

    async def _sender(self, websocket, queue: _ClientQueue) -> None:
        while True:
            await websocket.send(await queue.get())

    async def handle_client(self, websocket) -> None:
        queue = _ClientQueue()
        self._clients[websocket] = queue
        sender = asyncio.get_running_loop().create_task(self._sender(websocket, queue))
        try:
            await websocket.send(self._hello_message())
            async for raw in websocket:
                reply = await self._handle_raw(raw)
                if reply is not None:
                    await websocket.send(json.dumps(reply))
        finally:
            sender.cancel()
            self._clients.pop(websocket, None)

    async def _handle_raw(self, raw) -> dict | None:
        try:
            payload = json.loads(raw)
        except (json.JSONDecodeError, UnicodeDecodeError):
            return {"type": "error", "message": "message is not valid JSON"}
        if not isinstance(payload, dict) or payload.get("type") != "control":
            return {"type": "error", "message": "expected a control message"}
        try:
            return await self.handle_control(payload)
        except (EogHmiError, ValueError, OSError) as exc:
            return {"type": "error", "message": str(exc)}


async def serve(config: ServeConfig, model=None, *, ready: asyncio.Event | None = None):
    """Run the service until cancelled."""
    import websockets

    server = RealtimeServer(config, model=model)
    async with websockets.serve(server.handle_client, config.host, config.port):
        server.start_ingest()
        if ready is not None:
            ready.set()
        try:
            await asyncio.Future()
        finally:
            await server.stop_ingest()
