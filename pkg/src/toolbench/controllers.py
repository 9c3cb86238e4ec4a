"""Inner-loop robot controllers.

Three controllers act on the slave tool point:

* hybrid position-force: velocity command (I - S) V_d + S (K_fp F_e +
  K_fi integral(F_e)), with S the orthogonal projector onto the
  force-controlled subspace;
* admittance: a virtual mass-damper-spring turns measured external force
  into a compliant setpoint that the stiff position servo then tracks;
* stiff position PD, which deliberately lacks compliance.

A high-gain velocity servo adapts velocity commands to the point-mass
plant, which accepts forces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import require_finite

__all__ = [
    "SelectionMatrix",
    "HybridGains",
    "AdmittanceParams",
    "AdmittanceState",
    "PositionGains",
    "hybrid_command",
    "velocity_to_force",
    "admittance_step",
    "position_control",
    "saturate",
]

PROJECTOR_TOL = 1e-12


class SelectionMatrix:
    """Symmetric idempotent 3x3 projector selecting the force-controlled
    subspace; I - S selects the motion-controlled complement."""

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=float)
        if m.shape != (3, 3):
            raise ValueError(f"selection matrix must be 3x3, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("selection matrix has non-finite entries")
        self.m = m
        self.validate()

    @classmethod
    def from_normal(cls, n) -> "SelectionMatrix":
        """Rank-1 projector n n^T onto the surface normal direction."""
        n = require_finite(n, "selection normal")
        norm = float(np.linalg.norm(n))
        if norm < 1e-12:
            raise ValueError("selection normal is degenerate")
        n = n / norm
        return cls(np.outer(n, n))

    @classmethod
    def zero(cls) -> "SelectionMatrix":
        return cls(np.zeros((3, 3)))

    @classmethod
    def identity(cls) -> "SelectionMatrix":
        return cls(np.eye(3))

    def validate(self) -> None:
        m = self.m
        if np.max(np.abs(m - m.T)) > PROJECTOR_TOL:
            raise ValueError("selection matrix is not symmetric")
        if np.max(np.abs(m @ m - m)) > PROJECTOR_TOL:
            raise ValueError("selection matrix is not idempotent")

    @property
    def complement(self) -> np.ndarray:
        return np.eye(3) - self.m

    def project(self, v) -> np.ndarray:
        return self.m @ np.asarray(v, dtype=float)

    def project_complement(self, v) -> np.ndarray:
        return self.complement @ np.asarray(v, dtype=float)


@dataclass(frozen=True)
class HybridGains:
    """Force-loop PI gains: kfp in (m/s)/N, kfi in (m/s)/(N*s)."""

    kfp: float = 2.0e-3
    kfi: float = 4.0e-3

    def __post_init__(self):
        if not (np.isfinite(self.kfp) and np.isfinite(self.kfi)):
            raise ValueError("hybrid gains must be finite")
        if self.kfp < 0.0 or self.kfi < 0.0:
            raise ValueError("hybrid gains must be >= 0")


def hybrid_command(
    s: SelectionMatrix,
    v_d,
    f_e,
    force_integral,
    gains: HybridGains,
) -> np.ndarray:
    """Hybrid position-force velocity command.

    Returns (I - S) v_d + S (kfp * f_e + kfi * force_integral): force
    regulated along range(S), trajectory velocity passed through along the
    complement.  f_e is the force error in the surface-inward convention
    (positive error commands motion into the surface); the caller integrates
    f_e into force_integral along range(S) only.
    """
    s.validate()
    v_d = require_finite(v_d, "v_d")
    f_e = require_finite(f_e, "f_e")
    force_integral = require_finite(force_integral, "force_integral")
    return s.project_complement(v_d) + s.project(gains.kfp * f_e + gains.kfi * force_integral)


def saturate(f: np.ndarray, f_max: float) -> np.ndarray:
    """Scale f down to norm f_max if it exceeds it; direction preserved."""
    n2 = float(np.dot(f, f))
    if n2 > f_max * f_max:
        return f * (f_max / np.sqrt(n2))
    return f


def velocity_to_force(v_cmd, slave, kv: float = 400.0, f_max: float = 150.0) -> np.ndarray:
    """High-gain velocity servo: F = kv (v_cmd - v), saturated at f_max.

    Adapter between velocity-command controllers and the force-driven
    point-mass plant.
    """
    v_cmd = require_finite(v_cmd, "v_cmd")
    return saturate(kv * (v_cmd - slave.vel), f_max)


@dataclass(frozen=True)
class AdmittanceParams:
    """Virtual mass-damper-spring: mass kg, damping N*s/m, stiffness N/m.

    stiffness anchors the compliant setpoint to the commanded pose; zero
    stiffness gives a free mass-damper (terminal velocity F/B under constant
    load).
    """

    mass: float = 4.0
    damping: float = 120.0
    stiffness: float = 500.0

    def __post_init__(self):
        if not (self.mass > 0.0):
            raise ValueError("admittance mass must be > 0")
        if self.damping < 0.0 or self.stiffness < 0.0:
            raise ValueError("admittance damping and stiffness must be >= 0")

    @property
    def overdamped(self) -> bool:
        return self.damping * self.damping >= 4.0 * self.mass * self.stiffness


@dataclass
class AdmittanceState:
    x: np.ndarray
    v: np.ndarray

    def copy(self) -> "AdmittanceState":
        return AdmittanceState(self.x.copy(), self.v.copy())


def admittance_step(
    params: AdmittanceParams,
    x_ref,
    state: AdmittanceState,
    f_ext,
    dt: float,
) -> AdmittanceState:
    """Advance the compliant setpoint one step (semi-implicit Euler).

    Integrates M v' = F_ext - B v - K (x - x_ref); the returned x is the
    pose the stiff position servo should track.  With zero external force
    and K > 0 the setpoint converges to x_ref.
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    x_ref = require_finite(x_ref, "x_ref")
    f_ext = require_finite(f_ext, "f_ext")
    acc = (f_ext - params.damping * state.v - params.stiffness * (state.x - x_ref)) / params.mass
    v = state.v + acc * dt
    x = state.x + v * dt
    return AdmittanceState(x, v)


@dataclass(frozen=True)
class PositionGains:
    """Stiff pose-tracking PD: kp N/m, kd N*s/m."""

    kp: float = 1.0e4
    kd: float = 200.0

    def __post_init__(self):
        if not (self.kp > 0.0):
            raise ValueError("kp must be > 0")
        if self.kd < 0.0:
            raise ValueError("kd must be >= 0")


def position_control(gains: PositionGains, x_d, slave, f_max: float = 150.0) -> np.ndarray:
    """Stiff PD on pose: F = kp (x_d - x) - kd v, saturated at f_max."""
    x_d = require_finite(x_d, "x_d")
    return saturate(gains.kp * (x_d - slave.pos) - gains.kd * slave.vel, f_max)
