/**
 * Reconnecting WebSocket client for the realtime service.
 *
 * Emits SessionEvents (status changes, parsed messages, notices) to a single
 * handler. Control messages are sent only while the socket is open — a send
 * while disconnected is dropped with a visible notice, never queued silently.
 * The WebSocket constructor is injectable so tests can drive a fake.
 */
import { parseServerMsg, type ControlMsg } from "./protocol.js";
import type { SessionEvent } from "./state.js";

export interface WebSocketLike {
  readyState: number;
  send(data: string): void;
  close(): void;
  onopen: (() => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
}

const OPEN = 1;

export const BACKOFF_MS = [250, 500, 1000, 2000, 4000];

export interface SocketOptions {
  url: string;
  onEvent: (event: SessionEvent) => void;
  makeWebSocket?: (url: string) => WebSocketLike;
  setTimer?: (fn: () => void, ms: number) => unknown;
}

export class ReconnectingSocket {
  private readonly url: string;
  private readonly onEvent: (event: SessionEvent) => void;
  private readonly makeWebSocket: (url: string) => WebSocketLike;
  private readonly setTimer: (fn: () => void, ms: number) => unknown;
  private ws: WebSocketLike | null = null;
  private attempts = 0;
  private closed = false;

  constructor(options: SocketOptions) {
    this.url = options.url;
    this.onEvent = options.onEvent;
    this.makeWebSocket =
      options.makeWebSocket ?? ((url) => new WebSocket(url) as unknown as WebSocketLike);
    this.setTimer = options.setTimer ?? ((fn, ms) => setTimeout(fn, ms));
  }

  connect(): void {
    if (this.closed) return;
    this.onEvent({ kind: "status", status: "connecting" });
    let ws: WebSocketLike;
    try {
      ws = this.makeWebSocket(this.url);
    } catch {
      this.scheduleReconnect();
      return;
    }
    this.ws = ws;
    ws.onopen = () => {
      this.attempts = 0;
      this.onEvent({ kind: "status", status: "connected" });
    };
    ws.onmessage = (ev) => {
      const msg = parseServerMsg(String(ev.data));
      if (msg === null) {
        console.warn("ignoring malformed frame", ev.data);
        return;
      }
      this.onEvent({ kind: "message", msg });
    };
    ws.onerror = () => {
      // close follows; reconnect is scheduled there
    };
    ws.onclose = () => {
      if (this.ws !== ws) return;
      this.ws = null;
      this.onEvent({ kind: "status", status: "disconnected" });
      this.scheduleReconnect();
    };
  }

  private scheduleReconnect(): void {
    if (this.closed) return;
    const delay = BACKOFF_MS[Math.min(this.attempts, BACKOFF_MS.length - 1)];
    this.attempts += 1;
    this.setTimer(() => this.connect(), delay);
  }

  /** Send a control message; returns false (with a notice) when not connected. */
  send(control: ControlMsg): boolean {
    if (this.ws === null || this.ws.readyState !== OPEN) {
      this.onEvent({ kind: "notice", text: `not connected — dropped ${control.action}` });
      return false;
    }
    this.ws.send(JSON.stringify(control));
    return true;
  }

  close(): void {
    this.closed = true;
    if (this.ws !== null) this.ws.close();
    this.ws = null;
  }
}
