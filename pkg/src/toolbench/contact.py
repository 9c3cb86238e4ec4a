"""Penalty contact between the tool point and the beaded workpiece, and
Preston-law grinding removal over the tool footprint.

Contact is a Kelvin-Voigt penalty sampled at the tool center with a
unilateral clamp (the surface pushes, never pulls) plus Coulomb friction
against the tangential velocity.  Removal lowers the bead grid uniformly
over the footprint disk at preston_k * pressure * sliding speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Workpiece, surface_eval, vec3

__all__ = ["ContactState", "contact_force", "removal_step", "grinding_vibration", "NO_CONTACT"]

_ZERO = np.zeros(3)


@dataclass(frozen=True)
class ContactState:
    in_contact: bool
    penetration: float          # m, >= 0; > 0 iff in_contact
    normal: np.ndarray          # outward-from-material unit direction
    force_env: np.ndarray       # N, force exerted by the environment on the tool
    u: float = 0.0              # surface coords of the contact point
    v: float = 0.0

    @property
    def normal_force(self) -> float:
        """Magnitude of the normal component (>= 0 by unilaterality)."""
        return float(np.dot(self.force_env, self.normal))


NO_CONTACT = ContactState(
    in_contact=False,
    penetration=0.0,
    normal=vec3(0.0, 0.0, 1.0),
    force_env=vec3(0.0, 0.0, 0.0),
)


def contact_force(workpiece: Workpiece, slave) -> ContactState:
    """Evaluate penalty contact for the tool point `slave` (pos, vel).

    Normal force magnitude is max(0, k*delta - b*(v . n)): stiffness pushes
    the tool out along the separating direction, damping resists the normal
    velocity, and the clamp keeps the surface from ever pulling.  Friction is
    -mu*|f_n|*unit(v_t), zero below the tangential deadband.
    """
    sp = surface_eval(workpiece, slave.pos)
    if sp.clearance >= 0.0:
        return ContactState(False, 0.0, sp.normal, vec3(0, 0, 0), sp.u, sp.v)

    delta = -sp.clearance
    n = sp.normal
    v_n = float(np.dot(slave.vel, n))
    fn = workpiece.stiffness * delta - workpiece.damping * v_n
    if fn < 0.0:
        fn = 0.0
    f = fn * n

    if workpiece.friction_mu > 0.0 and fn > 0.0:
        v_t = slave.vel - v_n * n
        speed = float(np.dot(v_t, v_t)) ** 0.5
        if speed > workpiece.tangential_deadband:
            f = f - (workpiece.friction_mu * fn / speed) * v_t

    return ContactState(True, delta, n, f, sp.u, sp.v)


def removal_step(workpiece: Workpiece, contact: ContactState, v_t, dt: float) -> float:
    """Grind the bead field under the contact footprint for one step.

    Each footprint cell drops by preston_k * (f_n / A_tool) * |v_t| * dt,
    floored at zero height.  Returns the material volume removed (m^3).
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    if not contact.in_contact:
        return 0.0
    fn = contact.normal_force
    v_t = np.asarray(v_t, dtype=float)
    speed = float(np.dot(v_t, v_t)) ** 0.5
    if fn <= 0.0 or speed <= 0.0 or workpiece.preston_k <= 0.0:
        return 0.0
    dh = workpiece.preston_k * (fn / workpiece.tool_area) * speed * dt
    return workpiece.beads.grind(contact.u, contact.v, workpiece.tool_radius, dh)


def grinding_vibration(workpiece: Workpiece, contact: ContactState, slave, t: float) -> np.ndarray:
    """Tool-vibration force while grinding: a normal-direction ripple
    proportional to the normal force.  Zero whenever no material is being
    removed."""
    if workpiece.grind_vibration <= 0.0 or workpiece.preston_k <= 0.0 or not contact.in_contact:
        return _ZERO
    fn = contact.normal_force
    if fn <= 0.0:
        return _ZERO
    v_n = float(np.dot(slave.vel, contact.normal))
    v_t = slave.vel - v_n * contact.normal
    if float(np.dot(v_t, v_t)) ** 0.5 <= workpiece.tangential_deadband:
        return _ZERO
    engagement = fn if fn < workpiece.grind_vibration_sat else workpiece.grind_vibration_sat
    ripple = workpiece.grind_vibration * engagement * math.sin(
        2.0 * math.pi * workpiece.grind_vibration_hz * t
    )
    return ripple * contact.normal
