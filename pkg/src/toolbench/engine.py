"""Fixed-timestep dynamics: master handle and slave tool as 3-DOF point
masses advanced with semi-implicit (symplectic) Euler.

The step order is velocity update, position update, contact re-evaluation,
so the contact stored on the state always belongs to the post-step
configuration.  Any non-finite component raises SimulationFault; the runner
records it in the trace and stops cleanly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .contact import NO_CONTACT, ContactState, contact_force
from .geometry import Workpiece, vec3

__all__ = ["RigidPoint", "SimState", "SimulationFault", "integrate_step"]


class SimulationFault(RuntimeError):
    """Non-finite value produced by the integrator."""


@dataclass
class RigidPoint:
    pos: np.ndarray
    vel: np.ndarray
    mass: float

    def __post_init__(self):
        self.pos = np.asarray(self.pos, dtype=float)
        self.vel = np.asarray(self.vel, dtype=float)
        if not (self.mass > 0.0):
            raise ValueError(f"mass must be > 0, got {self.mass}")

    def copy(self) -> "RigidPoint":
        return RigidPoint(self.pos.copy(), self.vel.copy(), self.mass)


@dataclass
class SimState:
    slave: RigidPoint
    master: RigidPoint
    mode: str
    dt: float
    step: int = 0
    contact: ContactState = NO_CONTACT
    force_integral: np.ndarray = field(default_factory=lambda: vec3(0, 0, 0))
    integral_clamp: float = 50.0    # N*s anti-windup bound, per component

    @property
    def t(self) -> float:
        # exact step*dt so the time base never drifts
        return self.step * self.dt

    def accumulate_force_error(self, f_e_projected: np.ndarray) -> None:
        """Integrate the S-projected force error with component-wise clamp."""
        self.force_integral = np.clip(
            self.force_integral + f_e_projected * self.dt,
            -self.integral_clamp,
            self.integral_clamp,
        )

    def reset_force_integral(self) -> None:
        self.force_integral = vec3(0, 0, 0)


def _advance(point: RigidPoint, force: np.ndarray, dt: float) -> None:
    point.vel = point.vel + force * (dt / point.mass)
    point.pos = point.pos + point.vel * dt


def integrate_step(
    state: SimState,
    workpiece: Workpiece,
    applied_force_slave: np.ndarray,
    applied_force_master: np.ndarray,
    dt: float,
) -> SimState:
    """Advance master and slave one step under the applied forces.

    Semi-implicit Euler (v then x) applied independently to both points; the
    slave additionally feels the current contact force.  Contact is
    recomputed at the new configuration before the step counter advances.
    """
    if dt != state.dt:
        raise ValueError(f"dt {dt} does not match the configured step {state.dt}")

    f_slave = np.asarray(applied_force_slave, dtype=float) + state.contact.force_env
    f_master = np.asarray(applied_force_master, dtype=float)

    _advance(state.slave, f_slave, dt)
    _advance(state.master, f_master, dt)

    # one scalar probe: any NaN/Inf component poisons the sum of squares
    probe = (
        float(np.dot(state.slave.pos, state.slave.pos))
        + float(np.dot(state.slave.vel, state.slave.vel))
        + float(np.dot(state.master.pos, state.master.pos))
        + float(np.dot(state.master.vel, state.master.vel))
    )
    if not math.isfinite(probe):
        raise SimulationFault(
            f"non-finite state at step {state.step + 1}: "
            f"slave pos {state.slave.pos}, vel {state.slave.vel}"
        )

    state.contact = contact_force(workpiece, state.slave)
    state.step += 1
    return state
