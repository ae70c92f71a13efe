// Session protocol message shapes (see docs/protocol.md in the repository).
// The cockpit is a pure protocol client: every displayed value comes from
// these payloads, never from client-side recomputation.

export interface StateFrame {
  t: number;
  x: number;
  y: number;
  heading: number;
  e: number;
  de: number;
  u_brain: number;
  u_fuzzy: number;
  u_out: number;
  source: string;
  regulations: number;
  pending: number;
  cooldown: number;
  paused: boolean;
  running: boolean;
  done: boolean;
  outcome: string | null;
  max_abs_e: number;
  rms_e: number;
}

export interface TrackInfo {
  points: [number, number][];
  width: number;
  length: number;
}

export interface HelloMsg {
  v: number;
  type: "hello";
  session: string;
  config: Record<string, any>;
  track: TrackInfo;
}

export interface StateMsg {
  v: number;
  type: "state";
  frame: StateFrame;
}

export interface MetricsMsg {
  v: number;
  type: "metrics";
  metrics: Record<string, number | boolean | string>;
}

export interface ErrorMsg {
  v: number;
  type: "error";
  code: string;
  message: string;
}

export type ServerMsg = HelloMsg | StateMsg | MetricsMsg | ErrorMsg;

export type Direction = "left" | "right";

export type ClientMsg =
  | { type: "start"; realtime?: boolean }
  | { type: "pause" }
  | { type: "reset" }
  | { type: "tick"; n: number }
  | { type: "command"; direction: Direction }
  | { type: "config"; config: Record<string, any> };

export function parseServerMsg(raw: string): ServerMsg | null {
  let data: any;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (!data || typeof data !== "object") return null;
  if (data.type === "hello" && data.track && Array.isArray(data.track.points)) {
    return data as HelloMsg;
  }
  if (data.type === "state" && data.frame && typeof data.frame.t === "number") {
    return data as StateMsg;
  }
  if (data.type === "metrics" && data.metrics) return data as MetricsMsg;
  if (data.type === "error" && typeof data.code === "string") return data as ErrorMsg;
  return null;
}
