"""Enhanced-teleoperation layers: haptic virtual fixtures rendered to the
master, and shared control (autonomous force regulation along the surface
normal, operator-commanded lateral motion).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .controllers import HybridGains, SelectionMatrix, hybrid_command
from .engine import RigidPoint
from .geometry import InnerCylinder, Plane, require_finite, unit, vec3

__all__ = ["VirtualFixture", "SharedControlParams", "fixture_wrench", "shared_command"]


@dataclass(frozen=True)
class VirtualFixture:
    """Forbidden-region fixture: a spring-damper wall rendered on the master.

    side "keep_above" forbids the half-space below the surface (against the
    outward normal); "keep_below" forbids the other side.  `offset` shifts
    the wall along the surface normal for misalignment experiments.
    """

    geometry: Plane | InnerCylinder
    k: float = 5000.0       # N/m
    b: float = 50.0         # N*s/m, active only while penetrating
    side: str = "keep_above"
    offset: float = 0.0     # m along the surface normal

    def __post_init__(self):
        if not (self.k > 0.0):
            raise ValueError("fixture stiffness must be > 0")
        if self.b < 0.0:
            raise ValueError("fixture damping must be >= 0")
        if self.side not in ("keep_above", "keep_below"):
            raise ValueError(f"fixture side must be keep_above|keep_below, got {self.side!r}")

    def penetration(self, point: np.ndarray) -> tuple[float, np.ndarray]:
        """Depth past the wall on the forbidden side and the push-back direction."""
        clearance = self.geometry.clearance(point) - self.offset
        n = self.geometry.normal_at(point)
        if self.side == "keep_above":
            return (-clearance, n) if clearance < 0.0 else (0.0, n)
        return (clearance, -n) if clearance > 0.0 else (0.0, -n)


def fixture_wrench(vf: VirtualFixture, master: RigidPoint) -> np.ndarray:
    """Haptic force of the fixture on the master handle.

    Zero on the allowed side; while penetrating, a restoring spring along
    the push-back direction plus damping against the normal velocity.  Added
    to the master feedback before saturation.
    """
    p, n_back = vf.penetration(master.pos)
    if p <= 0.0:
        return vec3(0, 0, 0)
    v_n = float(np.dot(master.vel, n_back))
    return vf.k * p * n_back - vf.b * v_n * n_back


@dataclass(frozen=True)
class SharedControlParams:
    """Shared control: force autonomous along press_dir, lateral manual.

    press_dir is the surface-inward unit direction; S = press_dir
    press_dir^T selects the autonomous (force) subspace.
    """

    press_dir: np.ndarray
    f_d: float = 10.0           # N desired normal force
    gains: HybridGains = HybridGains()

    def __post_init__(self):
        object.__setattr__(self, "press_dir", unit(self.press_dir, "press_dir"))
        if self.f_d < 0.0:
            raise ValueError("desired force must be >= 0")
        # cached projector; construction validates it once
        object.__setattr__(self, "selection", SelectionMatrix.from_normal(self.press_dir))


def shared_command(
    p: SharedControlParams,
    v_teleop,
    f_meas,
    force_integral,
) -> np.ndarray:
    """Shared-control velocity command.

    The hybrid law with the trajectory velocity supplied live by
    teleoperation: force error f_d*press_dir - f_meas regulated along the
    normal, operator velocity passed through laterally.  f_meas is the
    tool-side sensor reading (force the tool applies to the environment),
    i.e. the negated contact force on the tool.
    """
    v_teleop = require_finite(v_teleop, "v_teleop")
    f_meas = require_finite(f_meas, "f_meas")
    f_e = p.f_d * p.press_dir - f_meas
    return hybrid_command(p.selection, v_teleop, f_e, force_integral, p.gains)
