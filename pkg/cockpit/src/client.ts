/**
 * WebSocket session client with a latest-wins frame mailbox and automatic
 * reconnect.  The caller polls `takeFrames()` on its render tick; input
 * sending never waits on rendering.
 */

import { PROTOCOL, parseServerFrame, type ClientMsg, type ServerFrame } from "./protocol.js";

export interface ClientHooks {
  onOpen?: () => void;
  onClose?: () => void;
  onError?: (detail: string) => void;
}

export class SessionClient {
  private url: string;
  private scenario: string | undefined;
  private ws: WebSocket | null = null;
  private frames: ServerFrame[] = [];
  private hooks: ClientHooks;
  private reconnectDelayMs = 500;
  private closedByUser = false;

  constructor(url: string, scenario: string | undefined, hooks: ClientHooks = {}) {
    this.url = url;
    this.scenario = scenario;
    this.hooks = hooks;
  }

  connect(): void {
    this.closedByUser = false;
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.addEventListener("open", () => {
      const hello: ClientMsg = { type: "hello", protocol: PROTOCOL, scenario: this.scenario };
      ws.send(JSON.stringify(hello));
      this.hooks.onOpen?.();
    });
    ws.addEventListener("message", (ev) => {
      try {
        this.frames.push(parseServerFrame(String(ev.data)));
      } catch {
        this.hooks.onError?.("malformed frame");
      }
    });
    ws.addEventListener("close", () => {
      this.hooks.onClose?.();
      this.ws = null;
      if (!this.closedByUser) {
        setTimeout(() => this.connect(), this.reconnectDelayMs);
      }
    });
    ws.addEventListener("error", () => {
      this.hooks.onError?.("socket error");
    });
  }

  get connected(): boolean {
    return this.ws !== null && this.ws.readyState === WebSocket.OPEN;
  }

  /** Drain buffered frames (ordered); the renderer keeps only the newest state. */
  takeFrames(): ServerFrame[] {
    const out = this.frames;
    this.frames = [];
    return out;
  }

  send(msg: ClientMsg): boolean {
    if (!this.connected) return false;
    this.ws!.send(JSON.stringify(msg));
    return true;
  }

  close(): void {
    this.closedByUser = true;
    if (this.ws) {
      this.send({ type: "bye" });
      this.ws.close();
    }
  }
}
