/**
 * Pointer capture: canvas pixels map to the workspace (u, z) cross-section;
 * holding the press button (mouse button / space) applies the push-in bias.
 * Intent messages are throttled to at most 120 Hz and carry a strictly
 * increasing seq.
 */

import type { IntentMsg } from "./protocol.js";

export interface WorkspaceMap {
  uMin: number;      // workspace u at the canvas left edge, m
  uMax: number;      // workspace u at the canvas right edge, m
  zTop: number;      // workspace z at the canvas top edge, m
  zBottom: number;   // workspace z at the canvas bottom edge, m
  widthPx: number;
  heightPx: number;
}

export function pointerToWorkspace(
  map: WorkspaceMap,
  px: number,
  py: number,
): { u: number; z: number } {
  const fx = Math.min(1, Math.max(0, px / map.widthPx));
  const fy = Math.min(1, Math.max(0, py / map.heightPx));
  return {
    u: map.uMin + fx * (map.uMax - map.uMin),
    z: map.zTop + fy * (map.zBottom - map.zTop),
  };
}

export class IntentSource {
  private seq = 0;
  private lastSentAt = -Infinity;
  private readonly minIntervalMs: number;
  readonly pathV: number;
  pressBias: number;

  constructor(pathV: number, pressBias: number, maxHz = 120) {
    this.pathV = pathV;
    this.pressBias = pressBias;
    this.minIntervalMs = 1000 / maxHz;
  }

  /**
   * Build the next intent message, or null when inside the rate window.
   * `pressing` selects the bias; `buttons` is passed through verbatim.
   */
  next(
    u: number,
    z: number,
    pressing: boolean,
    buttons: number,
    nowMs: number,
  ): IntentMsg | null {
    if (nowMs - this.lastSentAt < this.minIntervalMs) return null;
    this.lastSentAt = nowMs;
    this.seq += 1;
    return {
      type: "intent",
      seq: this.seq,
      intent_pos: [u, this.pathV, z],
      press_bias: pressing ? this.pressBias : 0,
      buttons,
    };
  }

  currentSeq(): number {
    return this.seq;
  }
}
