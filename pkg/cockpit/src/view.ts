/**
 * ViewState: everything the renderer draws, reduced purely from server
 * frames.  Rendering never blocks input capture; frames land in a
 * latest-wins mailbox consumed on animation ticks.
 */

import { BeadStrip } from "./beads.js";
import type { Mode, ServerFrame, StateFrame, WelcomeFrame } from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "stale" | "closed";

export interface ViewState {
  status: ConnectionStatus;
  scenario: string;
  modes: Mode[];
  mode: Mode;
  frame: StateFrame | null;
  beads: BeadStrip | null;
  pathV: number;
  forceSetpoint: number | null;
  duration: number;
  lastFrameAt: number;
  lastError: string | null;
}

export function initialViewState(): ViewState {
  return {
    status: "connecting",
    scenario: "",
    modes: ["A", "B", "C", "D", "VF", "SC"],
    mode: "B",
    frame: null,
    beads: null,
    pathV: 0,
    forceSetpoint: null,
    duration: 0,
    lastFrameAt: 0,
    lastError: null,
  };
}

export function applyFrame(view: ViewState, frame: ServerFrame, now: number): ViewState {
  switch (frame.type) {
    case "welcome": {
      const w = frame as WelcomeFrame;
      view.status = "connected";
      view.scenario = w.scenario;
      view.modes = w.modes;
      view.mode = w.mode;
      view.beads = new BeadStrip(w.grid, w.bead_cells);
      view.pathV = w.path_v;
      view.forceSetpoint = w.force_setpoint;
      view.duration = w.duration;
      view.lastFrameAt = now;
      return view;
    }
    case "state": {
      const s = frame as StateFrame;
      view.frame = s;
      view.mode = s.mode;
      view.beads?.applyPatch(s.bead_patch);
      view.lastFrameAt = now;
      view.status = "connected";
      return view;
    }
    case "error":
      view.lastError = `${frame.code}${frame.detail ? `: ${frame.detail}` : ""}`;
      return view;
    default:
      return view;
  }
}

/** Stale-frame indicator after 500 ms without state frames. */
export function refreshStatus(view: ViewState, now: number): ViewState {
  if (view.status === "connected" && now - view.lastFrameAt > 500) {
    view.status = "stale";
  }
  return view;
}
