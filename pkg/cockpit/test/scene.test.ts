import { describe, expect, it } from "vitest";

import { buildScene, type SceneConfig } from "../src/scene.js";
import { applyFrame, initialViewState, refreshStatus } from "../src/view.js";
import type { Mode, StateFrame, WelcomeFrame } from "../src/protocol.js";

const cfg: SceneConfig = {
  map: { uMin: -0.05, uMax: 0.35, zTop: 0.012, zBottom: -0.006, widthPx: 900, heightPx: 420 },
  forceBarMax: 60,
  forceWarn: 30,
};

function welcome(mode: Mode): WelcomeFrame {
  return {
    type: "welcome", protocol: "toolbench-proto/1", session: "s", scenario: "flat_b",
    mode, modes: ["A", "B", "C", "D", "VF", "SC"], dt: 0.001, duration: 20,
    grid: { u_min: -0.05, v_min: -0.03, pitch: 0.001, nu: 400, nv: 60, wrap_u: false },
    path_v: 0, force_setpoint: 10, bead_cells: [[140, 30, 0.002]],
  };
}

function state(mode: Mode, fNormal = 8, fault = false): StateFrame {
  return {
    type: "state", step: 1000, t: 1.0,
    slave_pos: [0.1, 0, -0.0004], master_pos: [0.1, 0, -0.001],
    f_normal: fNormal, master_feedback: [0, 0, -4],
    bead_patch: [], mode, removed_fraction: 0.25, fault,
    last_seq: 3, paused: false,
  };
}

function texts(ops: ReturnType<typeof buildScene>): string[] {
  return ops.filter((o) => o.op === "text").map((o) => (o as { text: string }).text);
}

describe("buildScene", () => {
  it("renders every selectable mode with its indicator", () => {
    for (const mode of ["A", "B", "C", "D", "VF", "SC"] as Mode[]) {
      const view = initialViewState();
      applyFrame(view, welcome(mode), 0);
      applyFrame(view, state(mode), 10);
      const labels = texts(buildScene(view, cfg));
      expect(labels.some((t) => t.startsWith(`mode ${mode}`))).toBe(true);
    }
  });

  it("shows the fixture overlay only in VF mode", () => {
    const view = initialViewState();
    applyFrame(view, welcome("VF"), 0);
    applyFrame(view, state("VF"), 10);
    expect(texts(buildScene(view, cfg))).toContain("fixture");

    const plain = initialViewState();
    applyFrame(plain, welcome("B"), 0);
    applyFrame(plain, state("B"), 10);
    expect(texts(buildScene(plain, cfg))).not.toContain("fixture");
  });

  it("shows the force setpoint line in SC mode", () => {
    const view = initialViewState();
    applyFrame(view, welcome("SC"), 0);
    applyFrame(view, state("SC"), 10);
    const lines = buildScene(view, cfg).filter((o) => o.op === "line");
    // surface line plus the setpoint marker line
    expect(lines.length).toBeGreaterThanOrEqual(2);
  });

  it("zero force draws an empty bar; warning color above threshold", () => {
    const view = initialViewState();
    applyFrame(view, welcome("B"), 0);
    applyFrame(view, state("B", 0), 10);
    const bars = buildScene(view, cfg).filter((o) => o.op === "rect" && (o as { fill: boolean }).fill);
    expect((bars[0] as { h: number }).h).toBe(0);

    applyFrame(view, state("B", 45), 20);
    const hot = buildScene(view, cfg).filter((o) => o.op === "rect" && (o as { fill: boolean }).fill);
    expect((hot[0] as { color: string }).color).toBe("#d04040");
  });

  it("flags stale frames after 500 ms without state", () => {
    const view = initialViewState();
    applyFrame(view, welcome("B"), 0);
    applyFrame(view, state("B"), 10);
    refreshStatus(view, 600);
    expect(texts(buildScene(view, cfg))).toContain("stale frames");
  });
});
