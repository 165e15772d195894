import { describe, expect, it } from "vitest";

import { render, BUTTONS } from "../src/render.js";
import { initialState, reduceAll, type SessionEvent } from "../src/state.js";

function stateWithTask(target: string, cursor: [number, number], score: number) {
  const events: SessionEvent[] = [
    { kind: "status", status: "connected" },
    { kind: "message", msg: { type: "task", target, cursor, score } },
  ];
  return reduceAll(events);
}

describe("render", () => {
  it("marks only the target button red", () => {
    const html = render(stateWithTask("up", [0.5, 0.5], 0));
    expect(html).toContain('class="button target" data-button="up"');
    for (const other of BUTTONS.filter((b) => b !== "up")) {
      expect(html).toContain(`class="button idle" data-button="${other}"`);
    }
  });

  it("positions the cursor from normalized server coordinates", () => {
    const html = render(stateWithTask("left", [0.25, 0.75], 1));
    // x: 25% across; y: 1-0.75 from the top
    expect(html).toContain('style="left:25.00%;top:25.00%"');
  });

  it("shows the server score verbatim", () => {
    expect(render(stateWithTask("down", [0, 0], 7))).toContain('<div class="score">7</div>');
  });

  it("renders a placeholder before the first task frame", () => {
    const html = render(initialState());
    expect(html).toContain('<div class="score">–</div>');
    expect(html).not.toContain('class="cursor"');
  });

  it("cursor at the field edge renders flush", () => {
    const html = render(stateWithTask("left", [0, 1], 0));
    expect(html).toContain('style="left:0.00%;top:0.00%"');
  });

  it("escapes server-controlled strings", () => {
    const state = reduceAll([
      { kind: "message", msg: { type: "error", message: "<script>alert(1)</script>" } },
    ]);
    const html = render(state);
    expect(html).not.toContain("<script>alert");
    expect(html).toContain("&lt;script&gt;");
  });

  it("is a pure function of the state", () => {
    const state = stateWithTask("right", [0.3, 0.6], 2);
    expect(render(state)).toBe(render(state));
  });
});
