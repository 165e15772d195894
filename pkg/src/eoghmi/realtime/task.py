"""The four-button pointing task whose score measures live control quality.

Buttons sit at the edge midpoints of the unit square; one of them is the
highlighted target.  The cursor moves in fixed steps, clamped to the square.
A click close enough to the target scores a point and a new target is drawn
from a seeded generator, so an identical command log always replays to an
identical final state.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..errors import InvalidParameterError
from .commands import CursorCommand

BUTTONS = {
    "left": (0.0, 0.5),
    "right": (1.0, 0.5),
    "up": (0.5, 1.0),
    "down": (0.5, 0.0),
}
DEFAULT_STEP = 0.04
HIT_RADIUS = 0.08

_MOVES = {
    "move-left": (-1.0, 0.0),
    "move-right": (1.0, 0.0),
    "move-up": (0.0, 1.0),
    "move-down": (0.0, -1.0),
}


@dataclass(frozen=True)
class TaskState:
    """Target, cursor, score, and the session clock of the last applied command."""

    target_button: str
    cursor: tuple[float, float]
    score: int
    session_clock: float

    def __post_init__(self):
        if self.target_button not in BUTTONS:
            raise InvalidParameterError(f"unknown button {self.target_button!r}")
        x, y = self.cursor
        if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
            raise InvalidParameterError("cursor must lie in the unit square")
        if self.score < 0:
            raise InvalidParameterError("score cannot be negative")


class TaskEngine:
    """Owns one task session: applies commands and draws targets deterministically."""

    def __init__(self, seed: int = 0, step: float = DEFAULT_STEP,
                 hit_radius: float = HIT_RADIUS):
        if step <= 0 or hit_radius <= 0:
            raise InvalidParameterError("step and hit_radius must be positive")
        self.seed = seed
        self.step = step
        self.hit_radius = hit_radius
        self._rng = np.random.default_rng(seed)
        self.state = TaskState(target_button=self._draw_target(),
                               cursor=(0.5, 0.5), score=0, session_clock=0.0)

    def _draw_target(self) -> str:
        return str(self._rng.choice(sorted(BUTTONS)))

    def reset(self) -> None:
        """Restart the session with the original seed (same target sequence)."""
        self._rng = np.random.default_rng(self.seed)
        self.state = TaskState(target_button=self._draw_target(),
                               cursor=(0.5, 0.5), score=0, session_clock=0.0)

    def apply(self, command: CursorCommand) -> TaskState:
        """Advance the task by one command and return the new state."""
        state = self.state
        if command.kind in _MOVES:
            dx, dy = _MOVES[command.kind]
            x = min(1.0, max(0.0, state.cursor[0] + dx * self.step))
            y = min(1.0, max(0.0, state.cursor[1] + dy * self.step))
            state = replace(state, cursor=(x, y), session_clock=command.t)
        elif command.kind in ("click", "double-click"):
            tx, ty = BUTTONS[state.target_button]
            dist = float(np.hypot(state.cursor[0] - tx, state.cursor[1] - ty))
            if dist <= self.hit_radius:
                state = replace(state, score=state.score + 1,
                                target_button=self._draw_target(),
                                session_clock=command.t)
            else:
                state = replace(state, session_clock=command.t)
        self.state = state
        return state


def replay_commands(commands, seed: int = 0, step: float = DEFAULT_STEP,
                    hit_radius: float = HIT_RADIUS) -> TaskState:
    """Rebuild the final state from a command log alone (event-sourcing check)."""
    engine = TaskEngine(seed=seed, step=step, hit_radius=hit_radius)
    for command in commands:
        engine.apply(command)
    return engine.state
