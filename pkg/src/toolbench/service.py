"""Live session server.

One WebSocket connection = one isolated simulation session.  The network
side never touches SimState directly: messages are queued and applied only
at step boundaries (last intent wins within a batch), so a recorded
session (config + step-indexed events) replays headlessly to the identical
trace.

Endpoints:
  GET /healthz     liveness + protocol version
  GET /scenarios   available scenario names
  WS  /session     JSON text frames, "type"-discriminated, versioned
                   handshake ("toolbench-proto/1")
"""

from __future__ import annotations

import asyncio
import json
import time
import uuid
from pathlib import Path

from aiohttp import WSMsgType, web

from .runner import StepPipeline
from .scenario import ConfigError, ScenarioConfig
from .scenarios import make_scenario, scenario_names
from .teleop import ControlMode
from .trace import write_trace

__all__ = ["PROTOCOL", "create_app", "serve"]

PROTOCOL = "toolbench-proto/1"
FRAME_EVERY_STEPS = 17          # ~60 Hz at the 1 kHz logical rate

KEY_TURBO = web.AppKey("turbo", bool)
KEY_DEFAULT_SCENARIO = web.AppKey("default_scenario", str)
KEY_RECORD_DIR = web.AppKey("record_dir", object)


def _error_frame(code: str, detail: str = "") -> dict:
    return {"type": "error", "code": code, "detail": detail}


class Session:
    """Owns one pipeline; applies client messages between steps and emits
    decimated state frames."""

    def __init__(self, config: ScenarioConfig, turbo: bool, record_dir: Path | None):
        self.config = config
        self.pipeline = StepPipeline(config)
        self.turbo = turbo
        self.record_dir = record_dir
        self.session_id = uuid.uuid4().hex[:12]
        self.paused = False
        self.closed = False
        self.last_seq = -1
        self.last_applied_seq = -1
        self.events: list[dict] = []
        self.pending: list[dict] = []
        self.reply_errors: list[dict] = []
        self._step_budget = 0.0
        self._last_tick = None

    # --------------------------------------------------------- messages

    def handle(self, msg: dict) -> dict | None:
        """Queue or apply one client message; returns an optional reply."""
        kind = msg.get("type")
        if kind == "intent":
            seq = msg.get("seq")
            if not isinstance(seq, int) or seq <= self.last_seq:
                raise ProtocolViolation("bad-seq", f"seq must increase, got {seq!r}")
            self.last_seq = seq
            self.pending.append(msg)
            return None
        if kind == "set_mode":
            if msg.get("mode") not in {m.value for m in ControlMode}:
                raise ProtocolViolation("bad-mode", f"unknown mode {msg.get('mode')!r}")
            self.pending.append(msg)
            return None
        if kind == "set_param":
            self.pending.append(msg)
            return None
        if kind == "pause":
            self.paused = True
            return {"type": "paused", "step": self.pipeline.state.step}
        if kind == "resume":
            self.paused = False
            self._last_tick = None
            return {"type": "resumed", "step": self.pipeline.state.step}
        if kind == "reset":
            self.pipeline = StepPipeline(self.config)
            self.events = []
            self.pending = []
            self.last_applied_seq = -1
            self._step_budget = 0.0
            return {"type": "reset_done"}
        if kind == "bye":
            self.closed = True
            return None
        raise ProtocolViolation("unknown-type", f"unknown message type {kind!r}")

    def apply_pending(self) -> None:
        """Apply queued messages at a step boundary.  A burst of intents
        collapses to the last one (last-writer-wins)."""
        if not self.pending:
            return
        batch, self.pending = self.pending, []
        intents = [m for m in batch if m["type"] == "intent"]
        others = [m for m in batch if m["type"] != "intent"]
        step = self.pipeline.state.step
        for msg in others:
            event = {k: v for k, v in msg.items() if k != "seq"}
            try:
                self.pipeline.apply_event(event)
            except ConfigError as exc:
                self.reply_errors.append(_error_frame("bad-param", str(exc)))
                continue
            self.events.append({"step": step, **event})
        if intents:
            last = intents[-1]
            event = {
                "type": "intent",
                "intent_pos": [float(x) for x in last["intent_pos"]],
                "press_bias": float(last.get("press_bias", self.config.operator.press_bias)),
                "buttons": int(last.get("buttons", 0)),
            }
            self.pipeline.apply_event(event)
            self.events.append({"step": step, **event})
            self.last_applied_seq = last["seq"]

    # ------------------------------------------------------------ frames

    def state_frame(self) -> dict:
        pipe = self.pipeline
        st = pipe.state
        patch = [[i, j, h] for i, j, h in pipe.workpiece.beads.drain_dirty()]
        return {
            "type": "state",
            "step": st.step,
            "t": st.t,
            "slave_pos": [float(x) for x in st.slave.pos],
            "master_pos": [float(x) for x in st.master.pos],
            "f_normal": st.contact.normal_force,
            "master_feedback": [float(x) for x in pipe.last_feedback],
            "bead_patch": patch,
            "mode": st.mode,
            "removed_fraction": pipe.removed_fraction,
            "fault": pipe.fault,
            "last_seq": self.last_applied_seq,
            "paused": self.paused,
        }

    def welcome_frame(self) -> dict:
        beads = self.pipeline.workpiece.beads
        grid = self.config.workpiece.grid
        return {
            "type": "welcome",
            "protocol": PROTOCOL,
            "session": self.session_id,
            "scenario": self.config.name,
            "mode": self.config.mode.value,
            "modes": [m.value for m in ControlMode],
            "dt": self.config.dt,
            "duration": self.config.duration,
            "grid": {
                "u_min": grid.u_min, "v_min": grid.v_min, "pitch": grid.pitch,
                "nu": beads.nu, "nv": beads.nv, "wrap_u": grid.wrap_u,
            },
            "path_v": self.config.operator.path.v0,
            "force_setpoint": self.config.shared.f_d if self.config.shared else None,
            "bead_cells": [[i, j, h] for i, j, h in beads.nonzero_cells()],
        }

    # -------------------------------------------------------------- run

    def step_batch(self) -> int:
        """Advance the logical clock by one frame's worth of steps."""
        if self.paused or self.pipeline.fault:
            return 0
        n_total = self.config.steps
        if self.turbo:
            budget = FRAME_EVERY_STEPS
        else:
            now = time.monotonic()
            if self._last_tick is None:
                self._last_tick = now
            self._step_budget += (now - self._last_tick) / self.config.dt
            self._last_tick = now
            budget = int(self._step_budget)
            self._step_budget -= budget
            budget = min(budget, 5 * FRAME_EVERY_STEPS)  # bound catch-up bursts
        done = 0
        while done < budget and self.pipeline.state.step < n_total and not self.pipeline.fault:
            self.apply_pending()
            self.pipeline.step()
            done += 1
        return done

    @property
    def finished(self) -> bool:
        return self.pipeline.state.step >= self.config.steps or self.pipeline.fault

    def session_doc(self) -> dict:
        return {
            "schema": "toolbench/1",
            "kind": "session",
            "session": self.session_id,
            "config": self.config.to_dict(),
            "events": self.events,
        }

    def finalize(self) -> None:
        if self.record_dir is None:
            return
        self.record_dir.mkdir(parents=True, exist_ok=True)
        doc_path = self.record_dir / f"session-{self.session_id}.json"
        with open(doc_path, "w") as f:
            json.dump(self.session_doc(), f, indent=2)
        trace_path = self.record_dir / f"session-{self.session_id}.trace.jsonl"
        write_trace(trace_path, self.pipeline.records,
                    {"scenario": self.config.name, "dt": self.config.dt,
                     "session": self.session_id})


class ProtocolViolation(Exception):
    def __init__(self, code: str, detail: str):
        self.code = code
        self.detail = detail
        super().__init__(f"{code}: {detail}")


async def _session_ws(request: web.Request) -> web.WebSocketResponse:
    ws = web.WebSocketResponse()
    await ws.prepare(request)
    app = request.app

    # versioned handshake first
    msg = await ws.receive()
    if msg.type != WSMsgType.TEXT:
        await ws.close()
        return ws
    try:
        hello = json.loads(msg.data)
    except json.JSONDecodeError:
        await ws.send_json(_error_frame("bad-json", "handshake must be JSON"))
        await ws.close()
        return ws
    if hello.get("type") != "hello" or hello.get("protocol") != PROTOCOL:
        await ws.send_json(_error_frame("unsupported-version",
                                        f"expected protocol {PROTOCOL!r}"))
        await ws.close()
        return ws

    scenario = hello.get("scenario", app[KEY_DEFAULT_SCENARIO])
    try:
        config = make_scenario(scenario) if isinstance(scenario, str) else ScenarioConfig.from_dict(scenario)
    except (KeyError, ConfigError) as exc:
        await ws.send_json(_error_frame("bad-scenario", str(exc)))
        await ws.close()
        return ws

    session = Session(config, app[KEY_TURBO], app[KEY_RECORD_DIR])
    await ws.send_json(session.welcome_frame())

    # network reads land in an ordered queue; the stepping loop drains it
    # only at step boundaries
    inbox: asyncio.Queue = asyncio.Queue()

    async def reader():
        async for msg in ws:
            if msg.type == WSMsgType.TEXT:
                inbox.put_nowait(msg.data)
        inbox.put_nowait(None)

    reader_task = asyncio.create_task(reader())
    frame_interval = 0.0 if app[KEY_TURBO] else 1.0 / 60.0
    fault_announced = False
    try:
        while not session.closed:
            while True:
                try:
                    item = inbox.get_nowait()
                except asyncio.QueueEmpty:
                    break
                if item is None:
                    session.closed = True
                    break
                try:
                    data = json.loads(item)
                except json.JSONDecodeError:
                    raise ProtocolViolation("bad-json", "frames must be JSON objects")
                if not isinstance(data, dict):
                    raise ProtocolViolation("bad-json", "frames must be JSON objects")
                reply = session.handle(data)
                if reply is not None:
                    await ws.send_json(reply)
            if session.closed:
                break
            session.step_batch()
            for err in session.reply_errors:
                await ws.send_json(err)
            session.reply_errors.clear()
            await ws.send_json(session.state_frame())
            if session.pipeline.fault and not fault_announced:
                await ws.send_json({"type": "fault", "step": session.pipeline.state.step})
                session.paused = True
                fault_announced = True
            await asyncio.sleep(frame_interval)
    except ProtocolViolation as exc:
        await ws.send_json(_error_frame(exc.code, exc.detail))
    except ConnectionResetError:
        pass
    finally:
        reader_task.cancel()
        session.finalize()
        if not ws.closed:
            await ws.close()
    return ws


async def _healthz(request: web.Request) -> web.Response:
    return web.json_response({"status": "ok", "protocol": PROTOCOL})


async def _scenarios(request: web.Request) -> web.Response:
    return web.json_response({"scenarios": scenario_names()})


def create_app(*, turbo: bool = False, default_scenario: str = "flat_b",
               record_dir: str | None = None, static_dir: str | None = None) -> web.Application:
    app = web.Application()
    app[KEY_TURBO] = turbo
    app[KEY_DEFAULT_SCENARIO] = default_scenario
    app[KEY_RECORD_DIR] = Path(record_dir) if record_dir else None
    app.router.add_get("/healthz", _healthz)
    app.router.add_get("/scenarios", _scenarios)
    app.router.add_get("/session", _session_ws)
    if static_dir and Path(static_dir).is_dir():
        app.router.add_get("/", lambda r: web.HTTPFound("/ui/index.html"))
        app.router.add_static("/ui/", static_dir)
    return app


def serve(port: int = 8787, **kwargs) -> None:
    """Run the session server until interrupted."""
    web.run_app(create_app(**kwargs), port=port)
