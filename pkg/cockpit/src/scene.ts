/**
 * Pure scene construction: ViewState in, draw-op list out.  The canvas
 * painter executes ops verbatim, so everything visible is testable without
 * a DOM.
 */

import type { ViewState } from "./view.js";
import { pointerToWorkspace, type WorkspaceMap } from "./input.js";

export type DrawOp =
  | { op: "line"; x1: number; y1: number; x2: number; y2: number; color: string; width: number }
  | { op: "polyline"; points: [number, number][]; color: string; width: number }
  | { op: "circle"; x: number; y: number; r: number; color: string; fill: boolean }
  | { op: "rect"; x: number; y: number; w: number; h: number; color: string; fill: boolean }
  | { op: "text"; x: number; y: number; text: string; color: string };

export interface SceneConfig {
  map: WorkspaceMap;
  forceBarMax: number;     // N at full bar height
  forceWarn: number;       // N where the bar turns warning-colored
}

function xOf(map: WorkspaceMap, u: number): number {
  return ((u - map.uMin) / (map.uMax - map.uMin)) * map.widthPx;
}

function yOf(map: WorkspaceMap, z: number): number {
  return ((z - map.zTop) / (map.zBottom - map.zTop)) * map.heightPx;
}

export function buildScene(view: ViewState, cfg: SceneConfig): DrawOp[] {
  const ops: DrawOp[] = [];
  const map = cfg.map;
  const surfaceY = yOf(map, 0);

  // workpiece surface line
  ops.push({ op: "line", x1: 0, y1: surfaceY, x2: map.widthPx, y2: surfaceY,
             color: "#888", width: 1 });

  // bead profile along the tool path row
  if (view.beads) {
    const profile = view.beads.profileAt(view.pathV);
    const points: [number, number][] = [];
    for (let i = 0; i < profile.length; i++) {
      const u = view.beads.uOfIndex(i);
      if (u < map.uMin || u > map.uMax) continue;
      points.push([xOf(map, u), yOf(map, profile[i])]);
    }
    if (points.length > 1) {
      ops.push({ op: "polyline", points, color: "#b5742a", width: 2 });
    }
  }

  // fixture overlay in VF mode: the haptic wall coincides with the surface
  if (view.mode === "VF") {
    ops.push({ op: "line", x1: 0, y1: surfaceY, x2: map.widthPx, y2: surfaceY,
               color: "#2ab5a0", width: 3 });
    ops.push({ op: "text", x: 8, y: surfaceY - 6, text: "fixture", color: "#2ab5a0" });
  }

  const frame = view.frame;
  if (frame) {
    // slave tool marker and master ghost in the (u, z) cross-section
    ops.push({ op: "circle", x: xOf(map, frame.slave_pos[0]), y: yOf(map, frame.slave_pos[2]),
               r: 7, color: "#d04040", fill: true });
    ops.push({ op: "circle", x: xOf(map, frame.master_pos[0]), y: yOf(map, frame.master_pos[2]),
               r: 7, color: "#4060d0", fill: false });

    // force bar with optional setpoint line (shared control)
    const barW = 26;
    const barX = map.widthPx - barW - 10;
    const frac = Math.min(1, frame.f_normal / cfg.forceBarMax);
    const barH = frac * (map.heightPx - 20);
    const warning = frame.f_normal >= cfg.forceWarn;
    ops.push({ op: "rect", x: barX, y: map.heightPx - 10 - barH, w: barW, h: barH,
               color: warning ? "#d04040" : "#40a040", fill: true });
    ops.push({ op: "rect", x: barX, y: 10, w: barW, h: map.heightPx - 20,
               color: "#666", fill: false });
    if (view.mode === "SC" && view.forceSetpoint !== null) {
      const spY = map.heightPx - 10 - Math.min(1, view.forceSetpoint / cfg.forceBarMax) * (map.heightPx - 20);
      ops.push({ op: "line", x1: barX - 4, y1: spY, x2: barX + barW + 4, y2: spY,
                 color: "#202020", width: 2 });
    }
    ops.push({ op: "text", x: barX - 2, y: map.heightPx - 10 - barH - 4,
               text: `${frame.f_normal.toFixed(1)} N`, color: "#202020" });

    // status strip: mode, progress, removal
    ops.push({ op: "text", x: 8, y: 16,
               text: `mode ${view.mode}  t=${frame.t.toFixed(2)}s  removed ${(frame.removed_fraction * 100).toFixed(0)}%`,
               color: frame.fault ? "#d04040" : "#202020" });
    if (frame.fault) {
      ops.push({ op: "text", x: 8, y: 32, text: "SIMULATION FAULT", color: "#d04040" });
    }
    if (frame.paused) {
      ops.push({ op: "text", x: 8, y: 48, text: "paused", color: "#806020" });
    }
  }

  if (view.status === "stale") {
    ops.push({ op: "text", x: map.widthPx / 2 - 40, y: 16, text: "stale frames", color: "#d0a000" });
  }
  return ops;
}

export { pointerToWorkspace };
