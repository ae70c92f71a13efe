import { describe, expect, it } from "vitest";

import {
  applyMessage,
  canSendCommand,
  deviationFill,
  initialModel,
  metricsReadout,
  setConnected,
  sourceBadge,
} from "../src/model.js";
import type { HelloMsg, StateFrame, StateMsg } from "../src/protocol.js";

function frame(over: Partial<StateFrame> = {}): StateFrame {
  return {
    t: 1.0, x: 2.0, y: 0.1, heading: 0.0, e: 0.05, de: 0.0,
    u_brain: 0.0, u_fuzzy: -1.0, u_out: 0.0, source: "brain",
    regulations: 0, pending: 0, cooldown: 0.0,
    paused: false, running: true, done: false, outcome: null,
    max_abs_e: 0.05, rms_e: 0.02,
    ...over,
  };
}

const hello: HelloMsg = {
  v: 1, type: "hello", session: "abc",
  config: { shared: { tau: 0.1 } },
  track: { points: [[0, 0], [1, 0]], width: 8.2, length: 714 },
};

function stateMsg(f: StateFrame): StateMsg {
  return { v: 1, type: "state", frame: f };
}

describe("view model reducer", () => {
  it("hello resets the run view", () => {
    let m = applyMessage(initialModel(), hello);
    m = applyMessage(m, stateMsg(frame()));
    m = applyMessage(m, hello);
    expect(m.trail).toHaveLength(0);
    expect(m.framesReceived).toBe(0);
    expect(m.track!.length).toBe(714);
  });

  it("trail grows one point per frame received", () => {
    let m = applyMessage(initialModel(), hello);
    for (let k = 0; k < 60; k++) {
      m = applyMessage(m, stateMsg(frame({ t: k * 0.01, x: k })));
    }
    expect(m.framesReceived).toBe(60);
    expect(m.trail).toHaveLength(60);
    expect(m.trail[59].x).toBe(59);
  });

  it("trail points carry the arbitration source of their sample", () => {
    let m = applyMessage(initialModel(), hello);
    m = applyMessage(m, stateMsg(frame({ source: "brain" })));
    m = applyMessage(m, stateMsg(frame({ source: "fuzzy" })));
    expect(m.trail.map((p) => p.source)).toEqual(["brain", "fuzzy"]);
  });

  it("metrics readout mirrors the latest frame verbatim", () => {
    let m = applyMessage(initialModel(), hello);
    const f = frame({ max_abs_e: 0.512, rms_e: 0.204, regulations: 7, source: "fuzzy" });
    m = applyMessage(m, stateMsg(f));
    const entries = Object.fromEntries(metricsReadout(m));
    expect(entries["max |e|"]).toBe("0.512 m");
    expect(entries["rms e"]).toBe("0.204 m");
    expect(entries["regulations"]).toBe("7");
    expect(entries["source"]).toBe("FUZZY");
  });

  it("final metrics land from the metrics message", () => {
    let m = applyMessage(initialModel(), hello);
    m = applyMessage(m, { v: 1, type: "metrics", metrics: { lap_completed: true } });
    expect(m.finalMetrics!["lap_completed"]).toBe(true);
  });

  it("rate-limit errors arm the flash timer", () => {
    let m = applyMessage(initialModel(), hello);
    m = applyMessage(m, { v: 1, type: "error", code: "rate-limited", message: "x" }, 1000);
    expect(m.flashUntil).toBe(1600);
    expect(m.lastError!.code).toBe("rate-limited");
  });

  it("reducer applies frames fast enough for realtime rendering", () => {
    let m = applyMessage(initialModel(), hello);
    const t0 = performance.now();
    for (let k = 0; k < 2000; k++) {
      m = applyMessage(m, stateMsg(frame({ t: k * 0.01 })));
    }
    expect(performance.now() - t0).toBeLessThan(500); // 2000 frames << 20 f/s budget
  });
});

describe("badges and gates", () => {
  it("source badge maps protocol sources", () => {
    expect(sourceBadge(frame({ source: "brain" }))).toBe("BRAIN");
    expect(sourceBadge(frame({ source: "fuzzy" }))).toBe("FUZZY");
    expect(sourceBadge(frame({ source: "blend" }))).toBe("BLEND");
    expect(sourceBadge(null)).toBe("-");
  });

  it("commands gated on connection, run state and cooldown", () => {
    let m = applyMessage(initialModel(), hello);
    m = applyMessage(m, stateMsg(frame()));
    expect(canSendCommand(m)).toBe(false); // not connected yet
    m = setConnected(m, true);
    expect(canSendCommand(m)).toBe(true);
    m = applyMessage(m, stateMsg(frame({ cooldown: 0.4 })));
    expect(canSendCommand(m)).toBe(false);
    m = applyMessage(m, stateMsg(frame({ done: true, running: false })));
    expect(canSendCommand(m)).toBe(false);
  });

  it("deviation bar centers at zero and saturates at tau", () => {
    expect(deviationFill(frame({ e: 0 }), 0.1)).toBe(0);
    expect(deviationFill(frame({ e: 0.05 }), 0.1)).toBeCloseTo(0.5);
    expect(deviationFill(frame({ e: -0.3 }), 0.1)).toBe(-1);
    expect(deviationFill(null, 0.1)).toBe(0);
  });
});
