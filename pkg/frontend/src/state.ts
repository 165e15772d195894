/**
 * Session view-state as a pure function of the event log.
 *
 * Every change flows through `reduce(state, event)`; nothing in here reads
 * clocks, sockets, or the DOM, so replaying a captured event log always
 * reproduces the exact final state (the serialized form is byte-for-byte
 * comparable). Score and cursor come only from server `task` frames — the
 * client never computes them locally.
 */
import type { ServerMsg, HelloMsg, PredictionMsg, TaskMsg } from "./protocol.js";

export const FEED_LIMIT = 50;

export type ConnectionStatus = "connecting" | "connected" | "disconnected";

export type SessionEvent =
  | { kind: "status"; status: ConnectionStatus }
  | { kind: "message"; msg: ServerMsg }
  | { kind: "select_activity"; activity: string }
  | { kind: "notice"; text: string };

export interface UiSessionState {
  connection: ConnectionStatus;
  hello: HelloMsg | null;
  task: TaskMsg | null;
  feed: PredictionMsg[]; // newest last, capped at FEED_LIMIT
  gapCount: number;
  selectedActivity: string | null;
  lastLatencyMs: number | null;
  notices: string[]; // newest last, capped at 5
}

export function initialState(): UiSessionState {
  return {
    connection: "connecting",
    hello: null,
    task: null,
    feed: [],
    gapCount: 0,
    selectedActivity: null,
    lastLatencyMs: null,
    notices: [],
  };
}

function pushCapped<T>(items: T[], item: T, limit: number): T[] {
  const out = items.concat([item]);
  return out.length > limit ? out.slice(out.length - limit) : out;
}

export function reduce(state: UiSessionState, event: SessionEvent): UiSessionState {
  switch (event.kind) {
    case "status": {
      // A reconnect starts a fresh stream: stale task/feed would misrender.
      if (event.status === "connecting") {
        return { ...initialState(), connection: "connecting", notices: state.notices };
      }
      return { ...state, connection: event.status };
    }
    case "select_activity":
      return { ...state, selectedActivity: event.activity };
    case "notice":
      return { ...state, notices: pushCapped(state.notices, event.text, 5) };
    case "message":
      return applyMessage(state, event.msg);
  }
}

function applyMessage(state: UiSessionState, msg: ServerMsg): UiSessionState {
  switch (msg.type) {
    case "hello":
      return { ...state, hello: msg };
    case "prediction":
      return {
        ...state,
        feed: pushCapped(state.feed, msg, FEED_LIMIT),
        lastLatencyMs: msg.latency_ms,
      };
    case "task":
      return { ...state, task: msg };
    case "gap":
      return { ...state, gapCount: state.gapCount + 1 };
    case "error":
      return { ...state, notices: pushCapped(state.notices, `server: ${msg.message}`, 5) };
  }
}

export function reduceAll(events: SessionEvent[], start?: UiSessionState): UiSessionState {
  return events.reduce(reduce, start ?? initialState());
}

/** Canonical serialization (sorted keys) for byte-for-byte comparisons. */
export function serializeViewState(state: UiSessionState): string {
  const canon = (v: unknown): unknown => {
    if (Array.isArray(v)) return v.map(canon);
    if (v !== null && typeof v === "object") {
      const src = v as Record<string, unknown>;
      const out: Record<string, unknown> = {};
      for (const key of Object.keys(src).sort()) out[key] = canon(src[key]);
      return out;
    }
    return v;
  };
  return JSON.stringify(canon(state));
}
