/**
 * Pure view: UiSessionState -> HTML string.
 *
 * Buttons sit at the four edge midpoints; the server's target button renders
 * red, the rest gray. The cursor is positioned from the server's normalized
 * coordinates ((0,0) bottom-left). Being a pure string function keeps the
 * whole view assertable in tests without a DOM.
 */
import type { UiSessionState } from "./state.js";

export const BUTTONS = ["left", "right", "up", "down"] as const;

const BUTTON_POS: Record<string, { left: string; top: string }> = {
  left: { left: "4%", top: "50%" },
  right: { left: "96%", top: "50%" },
  up: { left: "50%", top: "6%" },
  down: { left: "50%", top: "94%" },
};

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function render(state: UiSessionState): string {
  const parts: string[] = [];
  parts.push(
    `<div class="status status-${state.connection}">${state.connection}` +
    (state.hello ? ` · ${esc(state.hello.version)} · fs ${state.hello.fs} Hz` : "") +
    (state.gapCount > 0 ? ` · gaps ${state.gapCount}` : "") +
    `</div>`,
  );

  const task = state.task;
  parts.push(`<div class="field">`);
  for (const name of BUTTONS) {
    const pos = BUTTON_POS[name];
    const cls = task && task.target === name ? "button target" : "button idle";
    parts.push(
      `<div class="${cls}" data-button="${name}" ` +
      `style="left:${pos.left};top:${pos.top}">${name}</div>`,
    );
  }
  if (task) {
    const x = (task.cursor[0] * 100).toFixed(2);
    const y = ((1 - task.cursor[1]) * 100).toFixed(2);
    parts.push(`<div class="cursor" style="left:${x}%;top:${y}%"></div>`);
    parts.push(`<div class="score">${task.score}</div>`);
  } else {
    parts.push(`<div class="score">–</div>`);
  }
  parts.push(`</div>`);

  const latency = state.lastLatencyMs === null ? "–" : `${state.lastLatencyMs.toFixed(1)} ms`;
  const selected = state.selectedActivity ? esc(state.selectedActivity) : "none";
  parts.push(`<div class="meta">latency ${latency} · steering ${selected}</div>`);

  parts.push(`<ul class="feed">`);
  for (const p of state.feed.slice(-8).reverse()) {
    const mark = p.voluntary_blink ? " ●" : "";
    parts.push(`<li>t=${p.t.toFixed(1)} ${esc(p.activity)}${mark}</li>`);
  }
  parts.push(`</ul>`);

  for (const note of state.notices.slice(-3)) {
    parts.push(`<div class="notice">${esc(note)}</div>`);
  }
  return parts.join("\n");
}
