/**
 * Wire protocol "toolbench-proto/1": JSON text frames over the /session
 * WebSocket, discriminated by "type".  The cockpit only ever renders what
 * arrives in these frames; it simulates nothing.
 */

export const PROTOCOL = "toolbench-proto/1";

export type Mode = "A" | "B" | "C" | "D" | "VF" | "SC";

export interface HelloMsg {
  type: "hello";
  protocol: string;
  scenario?: string | object;
}

export interface IntentMsg {
  type: "intent";
  seq: number;
  intent_pos: [number, number, number];
  press_bias: number;
  buttons: number;
}

export interface SetModeMsg {
  type: "set_mode";
  mode: Mode;
}

export type ClientMsg =
  | HelloMsg
  | IntentMsg
  | SetModeMsg
  | { type: "set_param"; path: string; value: number }
  | { type: "pause" }
  | { type: "resume" }
  | { type: "reset" }
  | { type: "bye" };

export type BeadCell = [number, number, number]; // i, j, height (absolute, m)

export interface GridMeta {
  u_min: number;
  v_min: number;
  pitch: number;
  nu: number;
  nv: number;
  wrap_u: boolean;
}

export interface WelcomeFrame {
  type: "welcome";
  protocol: string;
  session: string;
  scenario: string;
  mode: Mode;
  modes: Mode[];
  dt: number;
  duration: number;
  grid: GridMeta;
  path_v: number;
  force_setpoint: number | null;
  bead_cells: BeadCell[];
}

export interface StateFrame {
  type: "state";
  step: number;
  t: number;
  slave_pos: [number, number, number];
  master_pos: [number, number, number];
  f_normal: number;
  master_feedback: [number, number, number];
  bead_patch: BeadCell[];
  mode: Mode;
  removed_fraction: number;
  fault: boolean;
  last_seq: number;
  paused: boolean;
}

export interface ErrorFrame {
  type: "error";
  code: string;
  detail?: string;
}

export type ServerFrame =
  | WelcomeFrame
  | StateFrame
  | ErrorFrame
  | { type: "paused"; step: number }
  | { type: "resumed"; step: number }
  | { type: "reset_done" }
  | { type: "fault"; step: number };

export function parseServerFrame(data: string): ServerFrame {
  const obj = JSON.parse(data);
  if (typeof obj !== "object" || obj === null || typeof obj.type !== "string") {
    throw new Error("malformed server frame");
  }
  return obj as ServerFrame;
}

export function isStateFrame(f: ServerFrame): f is StateFrame {
  return f.type === "state";
}

export function isWelcomeFrame(f: ServerFrame): f is WelcomeFrame {
  return f.type === "welcome";
}
