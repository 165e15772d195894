/** Browser bootstrap: socket -> reducer -> animation-frame renders. */
import { controlForKey } from "./keyboard.js";
import { render } from "./render.js";
import { ReconnectingSocket } from "./socket.js";
import { initialState, reduce, type SessionEvent, type UiSessionState } from "./state.js";

function serverUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("server");
  return fromQuery ?? `ws://${window.location.hostname || "localhost"}:8765`;
}

export function start(root: HTMLElement): void {
  let state: UiSessionState = initialState();
  let dirty = true;

  const apply = (event: SessionEvent): void => {
    state = reduce(state, event);
    dirty = true;
  };

  const socket = new ReconnectingSocket({ url: serverUrl(), onEvent: apply });
  socket.connect();

  window.addEventListener("keydown", (ev) => {
    const control = controlForKey(ev.key);
    if (control === null) return;
    ev.preventDefault();
    if (socket.send(control) && control.action === "set_activity") {
      apply({ kind: "select_activity", activity: String(control.value) });
    }
  });

  const frame = (): void => {
    if (dirty) {
      root.innerHTML = render(state);
      dirty = false;
    }
    window.requestAnimationFrame(frame);
  };
  window.requestAnimationFrame(frame);
}

if (typeof document !== "undefined") {
  const root = document.getElementById("app");
  if (root !== null) start(root);
}
