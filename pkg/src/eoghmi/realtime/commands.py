"""Mapping of per-window predictions onto cursor commands.

Directions follow a fixed mnemonic scheme (left eye -> left, right eye ->
right, eyebrows up -> up, frowning -> down); a voluntary blink clicks.  Two
voluntary blinks inside the double-click window must collapse into a single
double-click, so a lone click is held back until the window expires and is
emitted late if no second blink arrives.  At most one command is emitted per
prediction window.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..errors import InvalidParameterError
from .predict import ActivityPrediction

DOUBLE_CLICK_S = 1.2

ACTIVITY_DIRECTIONS = {
    "left_eye_closed": "move-left",
    "right_eye_closed": "move-right",
    "eyebrows_up": "move-up",
    "frowning": "move-down",
    "normal_glance": None,
}

COMMAND_KINDS = ("move-left", "move-right", "move-up", "move-down",
                 "click", "double-click")


@dataclass(frozen=True)
class CursorCommand:
    """One actuation of the task cursor, stamped with its source-window time."""

    kind: str
    t: float

    def __post_init__(self):
        if self.kind not in COMMAND_KINDS:
            raise InvalidParameterError(f"unknown command kind {self.kind!r}")


class CommandMapper:
    """Stateful prediction→command translator with double-click debouncing."""

    def __init__(self, double_click_s: float = DOUBLE_CLICK_S):
        if double_click_s <= 0:
            raise InvalidParameterError("double_click_s must be positive")
        self.double_click_s = double_click_s
        self._pending_click_t: float | None = None

    def reset(self) -> None:
        self._pending_click_t = None

    def feed(self, prediction: ActivityPrediction) -> CursorCommand | None:
        """Translate one prediction; returns at most one command."""
        t = prediction.window_end_t
        if prediction.voluntary_blink:
            if self._pending_click_t is not None:
                if t - self._pending_click_t <= self.double_click_s:
                    self._pending_click_t = None
                    return CursorCommand("double-click", t)
                held = self._pending_click_t  # expired: release it, hold the new one
                self._pending_click_t = t
                return CursorCommand("click", held)
            self._pending_click_t = t
            return None
        if self._pending_click_t is not None and t - self._pending_click_t > self.double_click_s:
            held = self._pending_click_t
            self._pending_click_t = None
            return CursorCommand("click", held)
        direction = ACTIVITY_DIRECTIONS.get(prediction.activity)
        if direction is None:
            return None
        return CursorCommand(direction, t)

    def flush(self, now: float) -> CursorCommand | None:
        """Release a held click whose double-click window has expired."""
        if self._pending_click_t is not None and now - self._pending_click_t > self.double_click_s:
            held = self._pending_click_t
            self._pending_click_t = None
            return CursorCommand("click", held)
        return None
