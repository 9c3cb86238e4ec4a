"""Bilateral master-slave couplings, the scripted operator, and the wiring
of the test configurations.

Modes:
  A: position-force coupling, admittance inner loop
  B: position-position coupling, admittance inner loop
  C: position-force coupling, stiff position inner loop
  D: position-position coupling, stiff position inner loop
  VF: mode B wiring plus a haptic virtual fixture on the master
  SC: shared control - force autonomous along the normal, lateral motion
      from the operator (position-force reflection to the master)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .contact import ContactState
from .controllers import saturate
from .engine import RigidPoint
from .geometry import vec3

__all__ = [
    "ControlMode",
    "CouplingParams",
    "OperatorModel",
    "OperatorState",
    "pf_coupling",
    "pp_coupling",
    "operator_step",
    "ModeWiring",
    "assemble_mode",
]


class ControlMode(str, Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    VF = "VF"
    SC = "SC"


@dataclass(frozen=True)
class CouplingParams:
    motion_scale: float = 1.0   # master -> slave workspace scaling
    kpp: float = 2000.0         # N/m position-position reflection stiffness
    bpp: float = 20.0           # N*s/m position-position reflection damping
    kff: float = 0.5            # force-reflection gain (position-force)
    f_m_max: float = 40.0       # N master feedback cap

    def __post_init__(self):
        if not (self.motion_scale > 0.0):
            raise ValueError("motion_scale must be > 0")
        if self.kpp < 0.0 or self.bpp < 0.0 or self.kff < 0.0:
            raise ValueError("coupling gains must be >= 0")
        if not (self.f_m_max > 0.0):
            raise ValueError("f_m_max must be > 0")


def pf_coupling(master: RigidPoint, contact: ContactState, p: CouplingParams, extra_feedback=None):
    """Position-force coupling: master position commands the slave setpoint;
    the measured tool contact force is reflected to the master.

    Returns (slave_setpoint, master_feedback); feedback saturates at f_m_max.
    `extra_feedback` (virtual fixture force) is added before saturation.
    """
    setpoint = p.motion_scale * master.pos
    fb = -p.kff * contact.force_env
    if extra_feedback is not None:
        fb = fb + extra_feedback
    return setpoint, saturate(fb, p.f_m_max)


def pp_coupling(master: RigidPoint, slave: RigidPoint, p: CouplingParams, extra_feedback=None):
    """Position-position coupling: force reflection synthesized from the
    master-slave position difference (plus master damping)."""
    setpoint = p.motion_scale * master.pos
    fb = p.kpp * (slave.pos / p.motion_scale - master.pos) - p.bpp * master.vel
    if extra_feedback is not None:
        fb = fb + extra_feedback
    return setpoint, saturate(fb, p.f_m_max)


@dataclass(frozen=True)
class OperatorModel:
    """Deterministic scripted stand-in for the human operator.

    The intent point chases the target path through a first-order lag
    (limited hand responsiveness); the hand couples to the master handle as
    a spring-damper, presses into the surface with a constant bias, adds
    seeded low-band tremor, and yields (retreats the intent along the
    surface normal) when sustained feedback exceeds a comfort threshold.
    The press direction is supplied per step so it can follow the local
    surface normal (bore-wall orbits).
    """

    bandwidth: float = 2.0              # Hz first-order tracking lag
    hand_stiffness: float = 800.0       # N/m
    hand_damping: float = 40.0          # N*s/m
    press_bias: float = 10.0            # N push into the surface
    tremor_amplitude: float = 0.0       # m
    seed: int = 0
    comfort_threshold: float = 15.0     # N sustained feedback before yielding
    comfort_window: float = 0.2         # s the threshold must persist
    yield_rate: float = 5.0e-4          # (m/s)/N retreat speed per excess N
    recover_rate: float = 2.0           # 1/s retreat decay when comfortable
    tremor_freqs: tuple = field(init=False)
    tremor_phases: tuple = field(init=False)

    def __post_init__(self):
        if not (self.bandwidth > 0.0):
            raise ValueError("operator bandwidth must be > 0")
        if not (self.hand_stiffness > 0.0):
            raise ValueError("hand stiffness must be > 0")
        if self.hand_damping < 0.0 or self.tremor_amplitude < 0.0:
            raise ValueError("hand damping and tremor amplitude must be >= 0")
        # three seeded sinusoids per axis in the 1-4 Hz band
        rng = np.random.default_rng(self.seed)
        freqs = 1.0 + 3.0 * rng.random((3, 3))
        phases = 2.0 * math.pi * rng.random((3, 3))
        object.__setattr__(self, "tremor_freqs", tuple(map(tuple, freqs)))
        object.__setattr__(self, "tremor_phases", tuple(map(tuple, phases)))

    @property
    def lag_tau(self) -> float:
        return 1.0 / (2.0 * math.pi * self.bandwidth)

    def tremor(self, t: float) -> np.ndarray:
        if self.tremor_amplitude == 0.0:
            return vec3(0, 0, 0)
        out = np.empty(3)
        for ax in range(3):
            s = 0.0
            for f, ph in zip(self.tremor_freqs[ax], self.tremor_phases[ax]):
                s += math.sin(2.0 * math.pi * f * t + ph)
            out[ax] = s / 3.0
        return self.tremor_amplitude * out


@dataclass
class OperatorState:
    intent: np.ndarray                  # lagged intent point, m
    retreat: float = 0.0                # m backed off along -press_dir
    discomfort_time: float = 0.0        # s feedback has stayed above threshold
    live: bool = False                  # live intents override the target path

    def copy(self) -> "OperatorState":
        return OperatorState(self.intent.copy(), self.retreat, self.discomfort_time, self.live)


def operator_step(
    op: OperatorModel,
    state: OperatorState,
    master: RigidPoint,
    master_feedback: np.ndarray,
    target: np.ndarray,
    press_dir: np.ndarray,
    t: float,
    dt: float,
) -> np.ndarray:
    """Advance the operator one step and return the hand force on the master.

    `target` is the scripted path point (ignored when a live intent has
    taken over); `press_dir` is the surface-inward unit direction at the
    work site.  Fully deterministic given the model seed.
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")

    if not state.live:
        alpha = dt / op.lag_tau
        state.intent = state.intent + alpha * (target - state.intent)

    # comfort/yield: sustained strong feedback makes the operator back off
    fb_mag = float(np.linalg.norm(master_feedback))
    if fb_mag > op.comfort_threshold:
        state.discomfort_time += dt
        if state.discomfort_time >= op.comfort_window:
            state.retreat += op.yield_rate * (fb_mag - op.comfort_threshold) * dt
    else:
        state.discomfort_time = 0.0
        state.retreat = max(0.0, state.retreat - op.recover_rate * state.retreat * dt)

    effective_intent = state.intent - state.retreat * press_dir
    hand = (
        op.hand_stiffness * (effective_intent - master.pos)
        - op.hand_damping * master.vel
        + op.press_bias * press_dir
        + op.hand_stiffness * op.tremor(t)
    )
    return hand


@dataclass(frozen=True)
class ModeWiring:
    """Per-step pipeline description for one control mode."""

    mode: ControlMode
    coupling: str               # "pf" | "pp"
    inner: str                  # "admittance" | "position" | "hybrid"
    fixture: bool = False
    shared: bool = False


_WIRING = {
    ControlMode.A: ModeWiring(ControlMode.A, "pf", "admittance"),
    ControlMode.B: ModeWiring(ControlMode.B, "pp", "admittance"),
    ControlMode.C: ModeWiring(ControlMode.C, "pf", "position"),
    ControlMode.D: ModeWiring(ControlMode.D, "pp", "position"),
    ControlMode.VF: ModeWiring(ControlMode.VF, "pp", "admittance", fixture=True),
    ControlMode.SC: ModeWiring(ControlMode.SC, "pf", "hybrid", shared=True),
}


def assemble_mode(mode: ControlMode, *, has_admittance: bool, has_fixture: bool, has_shared: bool) -> ModeWiring:
    """Return the wiring for `mode`, checking the parameter set is complete."""
    wiring = _WIRING[ControlMode(mode)]
    if wiring.inner == "admittance" and not has_admittance:
        raise ValueError(f"mode {wiring.mode.value} requires admittance parameters")
    if wiring.fixture and not has_fixture:
        raise ValueError("mode VF requires a virtual fixture")
    if wiring.shared and not has_shared:
        raise ValueError("mode SC requires shared-control parameters")
    return wiring
