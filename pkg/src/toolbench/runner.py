"""Scenario execution: the per-step control pipeline, batch runs, mode
comparison, and session replay.

The pipeline owns all mutable run state (sim state, operator state,
admittance state, trace), applies external events only at step boundaries,
and is bit-deterministic: identical config + event stream always produces
the identical trace.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from . import build
from .assist import fixture_wrench, shared_command
from .contact import contact_force, grinding_vibration, removal_step
from .controllers import (
    AdmittanceState,
    admittance_step,
    position_control,
    velocity_to_force,
)
from .engine import RigidPoint, SimState, SimulationFault, integrate_step
from .metrics import MetricsReport, compute_metrics
from .scenario import ConfigError, ScenarioConfig
from .teleop import (
    ControlMode,
    OperatorState,
    assemble_mode,
    operator_step,
    pf_coupling,
    pp_coupling,
)
from .trace import TraceRecord, trace_hash
from .geometry import vec3

__all__ = ["StepPipeline", "RunResult", "run_scenario", "compare_modes", "replay_session"]


def _tup(v) -> tuple:
    return (float(v[0]), float(v[1]), float(v[2]))


@dataclass
class RunResult:
    config: ScenarioConfig
    records: list
    fault: bool
    metrics: MetricsReport | None

    @property
    def trace_hash(self) -> str:
        return trace_hash(self.records)


class StepPipeline:
    """One live simulation: config in, deterministic trace out."""

    def __init__(self, config: ScenarioConfig):
        self.cfg = config
        self.workpiece = build.build_workpiece(config)
        self.path = build.build_path(config, self.workpiece)
        self.operator = build.build_operator(config)
        self.coupling = build.build_coupling(config)
        self.fixture = build.build_fixture(config, self.workpiece)
        self.shared = build.build_shared(config, self.path)
        self.pd = build.position_gains(config)
        self.adm_params = build.admittance_params(config)
        self.planner = config.operator.kind == "planner"

        self.wiring = assemble_mode(
            config.mode,
            has_admittance=self.adm_params is not None,
            has_fixture=self.fixture is not None,
            has_shared=self.shared is not None,
        )

        slave = RigidPoint(vec3(*config.slave.start_pos), vec3(0, 0, 0), config.slave.mass)
        master = RigidPoint(vec3(*config.master.start_pos), vec3(0, 0, 0), config.master.mass)
        self.state = SimState(
            slave=slave,
            master=master,
            mode=config.mode.value,
            dt=config.dt,
            integral_clamp=config.controllers.integral_clamp,
        )
        # initial contact at the start configuration
        self.state.contact = contact_force(self.workpiece, slave)
        self.op_state = OperatorState(intent=self.path.point(0.0).copy())
        self.adm_state = AdmittanceState(slave.pos.copy(), vec3(0, 0, 0))
        self.last_feedback = vec3(0, 0, 0)
        self.removed_volume = 0.0
        self.records: list[TraceRecord] = []
        self.fault = False

    # ------------------------------------------------------------- events

    def apply_event(self, event: dict) -> None:
        """Apply one step-boundary event (live input or replay)."""
        kind = event["type"]
        if kind == "intent":
            self.op_state.live = True
            self.op_state.intent = np.asarray(event["intent_pos"], dtype=float)
            if "press_bias" in event and event["press_bias"] is not None:
                self.operator = dataclasses.replace(
                    self.operator, press_bias=float(event["press_bias"])
                )
        elif kind == "set_mode":
            self.set_mode(ControlMode(event["mode"]))
        elif kind == "set_param":
            self.set_param(event["path"], event["value"])
        else:
            raise ConfigError("event.type", f"unknown event kind {kind!r}")

    def set_mode(self, mode: ControlMode) -> None:
        cfg = self.cfg.with_mode(mode)
        self.wiring = assemble_mode(
            mode,
            has_admittance=self.adm_params is not None,
            has_fixture=self.fixture is not None,
            has_shared=self.shared is not None,
        )
        self.cfg = cfg
        self.state.mode = mode.value
        self.state.reset_force_integral()
        # re-seed the compliant setpoint at the current pose (bumpless switch)
        self.adm_state = AdmittanceState(self.state.slave.pos.copy(), self.state.slave.vel.copy())

    def set_param(self, path: str, value) -> None:
        """Live parameter change, revalidated through the strict parser."""
        data = self.cfg.to_dict()
        node = data
        parts = path.split(".")
        for key in parts[:-1]:
            if not isinstance(node, dict) or key not in node:
                raise ConfigError(path, "unknown parameter path")
            node = node[key]
        if not isinstance(node, dict) or parts[-1] not in node:
            raise ConfigError(path, "unknown parameter path")
        node[parts[-1]] = value
        cfg = ScenarioConfig.from_dict(data)
        self.cfg = cfg
        self.coupling = build.build_coupling(cfg)
        self.pd = build.position_gains(cfg)
        self.adm_params = build.admittance_params(cfg)
        self.fixture = build.build_fixture(cfg, self.workpiece)
        self.shared = build.build_shared(cfg, self.path)
        live_press = self.operator.press_bias if self.op_state.live else cfg.operator.press_bias
        self.operator = dataclasses.replace(
            build.build_operator(cfg), press_bias=live_press
        )
        self.state.integral_clamp = cfg.controllers.integral_clamp

    # -------------------------------------------------------------- step

    def step(self) -> TraceRecord:
        cfg = self.cfg
        state = self.state
        dt = state.dt
        t = state.t
        contact = state.contact
        wiring = self.wiring

        # pilot: scripted operator on the master, or direct velocity planner
        if self.planner:
            feedback = vec3(0, 0, 0)
            master_force = vec3(0, 0, 0)
            setpoint = self.path.point(t)
        else:
            fixture_force = None
            if wiring.fixture and self.fixture is not None:
                fixture_force = fixture_wrench(self.fixture, state.master)
            if wiring.coupling == "pf":
                setpoint, feedback = pf_coupling(state.master, contact, self.coupling, fixture_force)
            else:
                setpoint, feedback = pp_coupling(state.master, state.slave, self.coupling, fixture_force)
            target, press_dir = self.path.target(t)
            hand = operator_step(
                self.operator, self.op_state, state.master, feedback,
                target, press_dir, t, dt,
            )
            master_force = hand + feedback - cfg.master.damping * state.master.vel

        # inner loop on the slave
        if wiring.inner == "admittance":
            self.adm_state = admittance_step(
                self.adm_params, setpoint, self.adm_state, contact.force_env, dt
            )
            f_slave = position_control(self.pd, self.adm_state.x, state.slave, cfg.slave.f_max)
        elif wiring.inner == "position":
            f_slave = position_control(self.pd, setpoint, state.slave, cfg.slave.f_max)
        else:  # hybrid (shared control / planner)
            sc = self.shared
            if self.planner:
                v_teleop = self.path.velocity(t) + cfg.operator.track_gain * (
                    setpoint - state.slave.pos
                )
            else:
                v_teleop = self.coupling.motion_scale * state.master.vel
            f_meas = -contact.force_env
            v_cmd = shared_command(sc, v_teleop, f_meas, state.force_integral)
            f_slave = velocity_to_force(v_cmd, state.slave, cfg.controllers.kv, cfg.slave.f_max)
            f_e = sc.f_d * sc.press_dir - f_meas
            state.accumulate_force_error(sc.selection.project(f_e))

        f_slave = f_slave + grinding_vibration(self.workpiece, contact, state.slave, t)

        try:
            integrate_step(state, self.workpiece, f_slave, master_force, dt)
        except SimulationFault:
            self.fault = True
            record = self._fault_record(setpoint, feedback)
            self.records.append(record)
            return record

        c = state.contact
        if c.in_contact:
            v_n = float(np.dot(state.slave.vel, c.normal))
            v_t = state.slave.vel - v_n * c.normal
            self.removed_volume += removal_step(self.workpiece, c, v_t, dt)

        record = TraceRecord(
            step=state.step,
            t=state.t,
            master_pos=_tup(state.master.pos),
            master_vel=_tup(state.master.vel),
            slave_pos=_tup(state.slave.pos),
            slave_vel=_tup(state.slave.vel),
            slave_setpoint=_tup(setpoint),
            f_normal=c.normal_force,
            f_env=_tup(c.force_env),
            master_feedback=_tup(feedback),
            mode=state.mode,
            removed_volume=self.removed_volume,
        )
        self.records.append(record)
        self.last_feedback = feedback
        return record

    def _fault_record(self, setpoint, feedback) -> TraceRecord:
        prev = self.records[-1] if self.records else None
        zero = (0.0, 0.0, 0.0)
        return TraceRecord(
            step=(prev.step + 1) if prev else 1,
            t=((prev.step + 1) * self.cfg.dt) if prev else self.cfg.dt,
            master_pos=prev.master_pos if prev else zero,
            master_vel=prev.master_vel if prev else zero,
            slave_pos=prev.slave_pos if prev else zero,
            slave_vel=prev.slave_vel if prev else zero,
            slave_setpoint=prev.slave_setpoint if prev else zero,
            f_normal=0.0,
            f_env=zero,
            master_feedback=zero,
            mode=self.state.mode,
            removed_volume=self.removed_volume,
            fault=True,
        )

    # --------------------------------------------------------------- run

    @property
    def removed_fraction(self) -> float:
        total = self.workpiece.initial_bead_volume
        return min(1.0, self.removed_volume / total) if total > 0.0 else 0.0

    def run(self, events: dict[int, list] | None = None) -> list[TraceRecord]:
        """Run to the configured duration, applying events at step boundaries."""
        n = self.cfg.steps
        while self.state.step < n and not self.fault:
            if events is not None:
                for event in events.get(self.state.step, ()):
                    self.apply_event(event)
            self.step()
        return self.records


def _events_by_step(event_list) -> dict[int, list]:
    out: dict[int, list] = {}
    for ev in event_list:
        out.setdefault(int(ev["step"]), []).append({k: v for k, v in ev.items() if k != "step"})
    return out


def run_scenario(config: ScenarioConfig, events=None) -> RunResult:
    """Execute a scenario; returns trace + metrics (metrics None on an
    empty/faulted trace where they cannot be computed)."""
    pipeline = StepPipeline(config)
    by_step = _events_by_step(events) if events else None
    records = pipeline.run(by_step)
    metrics = None
    if records:
        ctx = build.metrics_context(config)
        metrics = compute_metrics(records, ctx)
    return RunResult(config=config, records=records, fault=pipeline.fault, metrics=metrics)


@dataclass
class ComparisonReport:
    base: ScenarioConfig
    results: dict = field(default_factory=dict)     # mode value -> RunResult
    assertions: list = field(default_factory=list)  # evaluated ordering checks

    def to_dict(self) -> dict:
        out = {"schema": "toolbench/1", "kind": "comparison", "modes": {}, "assertions": self.assertions}
        for mode, res in self.results.items():
            entry = res.metrics.to_dict() if res.metrics else {"partial": True}
            entry["fault"] = res.fault
            out["modes"][mode] = entry
        return out


def compare_modes(config: ScenarioConfig, modes, orderings=None) -> ComparisonReport:
    """Run the same scenario under each mode (identical seed and operator
    script) and evaluate the expected metric orderings."""
    modes = [ControlMode(m) for m in modes]
    if len(modes) < 2:
        raise ValueError("compare_modes needs at least 2 modes")
    report = ComparisonReport(base=config)
    for mode in modes:
        report.results[mode.value] = run_scenario(config.with_mode(mode))
    if orderings is None:
        from .scenarios import EXPECTED_ORDERINGS

        orderings = EXPECTED_ORDERINGS
    for rule in orderings:
        left, right = rule["left"], rule["right"]
        if left not in report.results or right not in report.results:
            continue
        lm, rm = report.results[left].metrics, report.results[right].metrics
        if lm is None or rm is None:
            continue
        lv = getattr(lm, rule["metric"])
        rv = getattr(rm, rule["metric"])
        holds = lv > rv if rule["op"] == ">" else lv < rv
        report.assertions.append(
            {"metric": rule["metric"], "left": left, "right": right, "op": rule["op"],
             "left_value": lv, "right_value": rv, "holds": bool(holds)}
        )
    return report


def replay_session(doc: dict) -> RunResult:
    """Replay a recorded session document (config + step-indexed events)."""
    if doc.get("schema") != "toolbench/1" or doc.get("kind") != "session":
        raise ConfigError("schema", "not a toolbench session document")
    config = ScenarioConfig.from_dict(doc["config"])
    return run_scenario(config, doc.get("events", []))
