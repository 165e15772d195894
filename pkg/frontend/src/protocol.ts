/** Message types for the realtime service protocol ("eoghmi-rt/1"). */

export interface HelloMsg {
  type: "hello";
  version: string;
  fs: number;
  window_s: number;
  hop_s: number;
  activities: string[];
}

export interface PredictionMsg {
  type: "prediction";
  seq: number;
  t: number;
  activity: string;
  voluntary_blink: boolean;
  scores: number[];
  latency_ms: number;
}

export interface TaskMsg {
  type: "task";
  target: string;
  cursor: [number, number];
  score: number;
}

export interface GapMsg {
  type: "gap";
}

export interface ErrorMsg {
  type: "error";
  message: string;
}

export type ServerMsg = HelloMsg | PredictionMsg | TaskMsg | GapMsg | ErrorMsg;

export interface ControlMsg {
  type: "control";
  action: "set_activity" | "set_source" | "set_speed" | "reset";
  value?: string | number;
}

const isNum = (v: unknown): v is number => typeof v === "number" && Number.isFinite(v);
const isStr = (v: unknown): v is string => typeof v === "string";

/**
 * Parse one raw frame into a typed server message.
 *
 * Returns null for anything that is not a well-formed protocol message;
 * callers log-and-ignore those so a bad frame never kills the session.
 */
export function parseServerMsg(raw: string): ServerMsg | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) return null;
  const m = data as Record<string, unknown>;
  switch (m.type) {
    case "hello":
      if (
        isStr(m.version) && isNum(m.fs) && isNum(m.window_s) && isNum(m.hop_s) &&
        Array.isArray(m.activities) && m.activities.every(isStr)
      ) {
        return {
          type: "hello", version: m.version, fs: m.fs,
          window_s: m.window_s, hop_s: m.hop_s, activities: m.activities,
        };
      }
      return null;
    case "prediction":
      if (
        isNum(m.seq) && isNum(m.t) && isStr(m.activity) &&
        typeof m.voluntary_blink === "boolean" &&
        Array.isArray(m.scores) && m.scores.every(isNum) && isNum(m.latency_ms)
      ) {
        return {
          type: "prediction", seq: m.seq, t: m.t, activity: m.activity,
          voluntary_blink: m.voluntary_blink, scores: m.scores as number[],
          latency_ms: m.latency_ms,
        };
      }
      return null;
    case "task":
      if (
        isStr(m.target) && Array.isArray(m.cursor) && m.cursor.length === 2 &&
        m.cursor.every(isNum) && isNum(m.score)
      ) {
        return {
          type: "task", target: m.target,
          cursor: [m.cursor[0], m.cursor[1]] as [number, number], score: m.score,
        };
      }
      return null;
    case "gap":
      return { type: "gap" };
    case "error":
      return isStr(m.message) ? { type: "error", message: m.message } : null;
    default:
      return null;
  }
}
