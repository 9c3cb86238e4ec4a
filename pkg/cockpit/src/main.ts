/**
 * Cockpit wiring: connect to the session server (?host=, ?scenario= query
 * params), map pointer input to intents, render state frames on animation
 * ticks.  Hold the left mouse button (or space) to press the tool into the
 * surface; number keys or the buttons switch control mode.
 */

import { SessionClient } from "./client.js";
import { IntentSource, pointerToWorkspace, type WorkspaceMap } from "./input.js";
import type { Mode, StateFrame, WelcomeFrame } from "./protocol.js";
import { buildScene, type SceneConfig } from "./scene.js";
import { paint } from "./render.js";
import { applyFrame, initialViewState, refreshStatus } from "./view.js";

const params = new URLSearchParams(location.search);
const host = params.get("host") ?? location.host;
const scenario = params.get("scenario") ?? undefined;
const wsUrl = `ws://${host}/session`;

const canvas = document.getElementById("scene") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const banner = document.getElementById("banner") as HTMLDivElement;
const modeBar = document.getElementById("modes") as HTMLDivElement;

const map: WorkspaceMap = {
  uMin: -0.05,
  uMax: 0.35,
  zTop: 0.012,
  zBottom: -0.006,
  widthPx: canvas.width,
  heightPx: canvas.height,
};
const sceneCfg: SceneConfig = { map, forceBarMax: 60, forceWarn: 30 };

const view = initialViewState();
let intents: IntentSource | null = null;
let pointer = { u: 0, z: 0.002, inside: false };
let pressing = false;

const client = new SessionClient(wsUrl, scenario, {
  onOpen: () => {
    banner.textContent = "";
    console.log(`connected to ${wsUrl}`);
  },
  onClose: () => {
    banner.textContent = "disconnected - reconnecting";
    view.status = "closed";
  },
  onError: (detail) => console.log("socket error:", detail),
});
client.connect();

function modeButtons(modes: Mode[], active: Mode): void {
  modeBar.replaceChildren(
    ...modes.map((m) => {
      const b = document.createElement("button");
      b.textContent = m;
      b.className = m === active ? "mode active" : "mode";
      b.addEventListener("click", () => client.send({ type: "set_mode", mode: m }));
      return b;
    }),
  );
}

canvas.addEventListener("pointermove", (ev) => {
  const rect = canvas.getBoundingClientRect();
  const { u, z } = pointerToWorkspace(map, ev.clientX - rect.left, ev.clientY - rect.top);
  pointer = { u, z, inside: true };
  sendIntent(ev.buttons);
});
canvas.addEventListener("pointerdown", (ev) => {
  pressing = true;
  sendIntent(ev.buttons);
});
canvas.addEventListener("pointerup", (ev) => {
  pressing = false;
  sendIntent(ev.buttons);
});
canvas.addEventListener("pointerleave", () => {
  pointer.inside = false;
});
window.addEventListener("keydown", (ev) => {
  if (ev.code === "Space") pressing = true;
  const order: Mode[] = ["A", "B", "C", "D", "VF", "SC"];
  const idx = Number(ev.key) - 1;
  if (idx >= 0 && idx < order.length) client.send({ type: "set_mode", mode: order[idx] });
  if (ev.key === "p") client.send({ type: "pause" });
  if (ev.key === "r") client.send({ type: "resume" });
});
window.addEventListener("keyup", (ev) => {
  if (ev.code === "Space") pressing = false;
});

function sendIntent(buttons: number): void {
  if (!intents || !pointer.inside || !client.connected) return;
  const msg = intents.next(pointer.u, pointer.z, pressing || buttons > 0, buttons, performance.now());
  if (msg) client.send(msg);
}

function tick(): void {
  for (const frame of client.takeFrames()) {
    if (frame.type === "welcome") {
      const w = frame as WelcomeFrame;
      intents = new IntentSource(w.path_v, 10.0);
      modeButtons(w.modes, w.mode);
    }
    if (frame.type === "error") {
      banner.textContent = `server error: ${(frame as { code: string }).code}`;
    }
    applyFrame(view, frame, performance.now());
    if (frame.type === "state") {
      const active = (frame as StateFrame).mode;
      for (const b of modeBar.querySelectorAll("button")) {
        b.className = b.textContent === active ? "mode active" : "mode";
      }
    }
  }
  refreshStatus(view, performance.now());
  paint(ctx, canvas.width, canvas.height, buildScene(view, sceneCfg));
  requestAnimationFrame(tick);
}
requestAnimationFrame(tick);
