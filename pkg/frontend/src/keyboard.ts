/** Keyboard steering: map keys onto synthetic-source activity switches. */
import type { ControlMsg } from "./protocol.js";

export const KEY_ACTIVITY: Record<string, string> = {
  ArrowLeft: "left_eye_closed",
  ArrowRight: "right_eye_closed",
  ArrowUp: "eyebrows_up",
  ArrowDown: "frowning",
  " ": "blink",
  b: "blink",
  n: "normal_glance",
};

/** Translate a key press into a control message, or null for unmapped keys. */
export function controlForKey(key: string): ControlMsg | null {
  if (key === "r") return { type: "control", action: "reset" };
  const activity = KEY_ACTIVITY[key];
  if (activity === undefined) return null;
  return { type: "control", action: "set_activity", value: activity };
}
