// Cockpit view model: a pure reducer over server messages. Rendering reads
// this state; nothing here touches the DOM or the socket, so it is unit
// testable. The trail records one point per received frame, tagged with the
// arbitration source active at that sample.

import type { ServerMsg, StateFrame, TrackInfo } from "./protocol.js";

export interface TrailPoint {
  x: number;
  y: number;
  source: string;
}

export interface ViewModel {
  connected: boolean;
  sessionId: string | null;
  config: Record<string, any> | null;
  track: TrackInfo | null;
  frame: StateFrame | null;
  trail: TrailPoint[];
  framesReceived: number;
  finalMetrics: Record<string, number | boolean | string> | null;
  lastError: { code: string; message: string } | null;
  /** wall-clock ms when the last rejection notice should stop flashing */
  flashUntil: number;
}

export function initialModel(): ViewModel {
  return {
    connected: false,
    sessionId: null,
    config: null,
    track: null,
    frame: null,
    trail: [],
    framesReceived: 0,
    finalMetrics: null,
    lastError: null,
    flashUntil: 0,
  };
}

export function applyMessage(model: ViewModel, msg: ServerMsg, nowMs = 0): ViewModel {
  switch (msg.type) {
    case "hello":
      // new or reconfigured run: the trail belongs to the old one
      return {
        ...model,
        sessionId: msg.session,
        config: msg.config,
        track: msg.track,
        frame: null,
        trail: [],
        framesReceived: 0,
        finalMetrics: null,
        lastError: null,
      };
    case "state": {
      const f = msg.frame;
      const trail = model.trail.concat([{ x: f.x, y: f.y, source: f.source }]);
      return {
        ...model,
        frame: f,
        trail,
        framesReceived: model.framesReceived + 1,
      };
    }
    case "metrics":
      return { ...model, finalMetrics: msg.metrics };
    case "error": {
      const flash = msg.code === "rate-limited" ? nowMs + 600 : model.flashUntil;
      return {
        ...model,
        lastError: { code: msg.code, message: msg.message },
        flashUntil: flash,
      };
    }
  }
}

export function setConnected(model: ViewModel, connected: boolean): ViewModel {
  return { ...model, connected };
}

/** Badge text for the active control source. */
export function sourceBadge(frame: StateFrame | null): "BRAIN" | "FUZZY" | "BLEND" | "-" {
  if (!frame) return "-";
  if (frame.source === "brain") return "BRAIN";
  if (frame.source === "fuzzy") return "FUZZY";
  return "BLEND";
}

/** Client-side mirror of the command rate limit; the server still enforces. */
export function canSendCommand(model: ViewModel): boolean {
  const f = model.frame;
  return model.connected && !!f && f.running && !f.done && f.cooldown <= 0;
}

/** Deviation bar fill in [-1, 1], saturating at the switching threshold. */
export function deviationFill(frame: StateFrame | null, tau: number): number {
  if (!frame || tau <= 0) return 0;
  const z = frame.e / tau;
  return z < -1 ? -1 : z > 1 ? 1 : z;
}

/** Live metric readout lines, verbatim from the latest frame. */
export function metricsReadout(model: ViewModel): [string, string][] {
  const f = model.frame;
  if (!f) return [];
  return [
    ["max |e|", f.max_abs_e.toFixed(3) + " m"],
    ["rms e", f.rms_e.toFixed(3) + " m"],
    ["regulations", String(f.regulations)],
    ["source", sourceBadge(f)],
  ];
}
