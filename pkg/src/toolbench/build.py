"""Construction of runtime domain objects from a ScenarioConfig."""

from __future__ import annotations

import numpy as np

from .assist import SharedControlParams, VirtualFixture
from .controllers import AdmittanceParams, HybridGains, PositionGains
from .geometry import BeadField, GaussianRidge, InnerCylinder, Plane, Workpiece, vec3
from .metrics import MetricsContext
from .scenario import ScenarioConfig
from .teleop import CouplingParams, OperatorModel

__all__ = [
    "build_geometry",
    "build_workpiece",
    "build_fixture",
    "SurfacePath",
    "build_path",
    "build_operator",
    "build_coupling",
    "build_shared",
    "metrics_context",
]


def build_geometry(spec):
    if spec.kind == "plane":
        return Plane(vec3(*spec.origin), vec3(*spec.normal))
    return InnerCylinder(vec3(*spec.origin), vec3(*spec.normal), spec.radius)


def build_workpiece(cfg: ScenarioConfig) -> Workpiece:
    w = cfg.workpiece
    geometry = build_geometry(w.geometry)
    grid = w.grid
    beads = BeadField(grid.u_min, grid.u_max, grid.v_min, grid.v_max, grid.pitch, grid.wrap_u)
    for ridge in w.beads:
        beads.add_ridge(GaussianRidge(ridge.axis, ridge.center, ridge.height, ridge.sigma))
    return Workpiece(
        geometry=geometry,
        beads=beads,
        stiffness=w.stiffness,
        damping=w.damping,
        friction_mu=w.friction_mu,
        tangential_deadband=w.tangential_deadband,
        preston_k=w.preston_k,
        tool_radius=w.tool_radius,
        grind_vibration=w.grind_vibration,
        grind_vibration_hz=w.grind_vibration_hz,
        grind_vibration_sat=w.grind_vibration_sat,
    )


def build_fixture(cfg: ScenarioConfig, workpiece: Workpiece) -> VirtualFixture | None:
    if cfg.fixture is None:
        return None
    # fixture overlaid on the workpiece's true geometry (offset for
    # misalignment experiments)
    return VirtualFixture(
        geometry=workpiece.geometry,
        k=cfg.fixture.k,
        b=cfg.fixture.b,
        side=cfg.fixture.side,
        offset=cfg.fixture.offset,
    )


class SurfacePath:
    """Time-parameterized straight segment in surface coordinates, embedded
    on the nominal surface."""

    def __init__(self, spec, geometry, hover=0.0):
        self.spec = spec
        self.geometry = geometry
        self.hover = hover
        self._duration = spec.t_end - spec.t_start
        self._du = (spec.u1 - spec.u0) / self._duration
        self._dv = (spec.v1 - spec.v0) / self._duration
        self._planar = isinstance(geometry, Plane)

    def uv(self, t: float) -> tuple[float, float]:
        s = (t - self.spec.t_start) / self._duration
        s = min(max(s, 0.0), 1.0)
        return (
            self.spec.u0 + s * (self.spec.u1 - self.spec.u0),
            self.spec.v0 + s * (self.spec.v1 - self.spec.v0),
        )

    def point(self, t: float) -> np.ndarray:
        u, v = self.uv(t)
        return self.geometry.embed(u, v, self.hover)

    def velocity(self, t: float) -> np.ndarray:
        """Analytic feedforward velocity along the surface."""
        if t <= self.spec.t_start or t >= self.spec.t_end:
            return vec3(0, 0, 0)
        t1, t2 = self.geometry.axes
        if self._planar:
            return self._du * t1 + self._dv * t2
        u, _ = self.uv(t)
        theta = u / self.geometry.radius
        circ = -np.sin(theta) * t1 + np.cos(theta) * t2
        return self._du * circ + self._dv * self.geometry.axis_dir

    def target(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """(path point, surface-inward press direction) in one evaluation."""
        p = self.point(t)
        return p, -self.geometry.normal_at(p)

    def press_dir(self, t: float) -> np.ndarray:
        """Surface-inward unit direction at the current target point."""
        return -self.geometry.normal_at(self.point(t))


def build_path(cfg: ScenarioConfig, workpiece: Workpiece) -> SurfacePath:
    return SurfacePath(cfg.operator.path, workpiece.geometry, cfg.operator.hover)


def build_operator(cfg: ScenarioConfig) -> OperatorModel:
    op = cfg.operator
    return OperatorModel(
        bandwidth=op.bandwidth,
        hand_stiffness=op.hand_stiffness,
        hand_damping=op.hand_damping,
        press_bias=op.press_bias,
        tremor_amplitude=op.tremor_amplitude,
        seed=cfg.seed,
        comfort_threshold=op.comfort_threshold,
        comfort_window=op.comfort_window,
        yield_rate=op.yield_rate,
        recover_rate=op.recover_rate,
    )


def build_coupling(cfg: ScenarioConfig) -> CouplingParams:
    c = cfg.coupling
    return CouplingParams(c.motion_scale, c.kpp, c.bpp, c.kff, c.f_m_max)


def build_shared(cfg: ScenarioConfig, path: SurfacePath) -> SharedControlParams | None:
    if cfg.shared is None:
        return None
    return SharedControlParams(
        press_dir=path.press_dir(cfg.operator.path.t_start),
        f_d=cfg.shared.f_d,
        gains=HybridGains(cfg.controllers.kfp, cfg.controllers.kfi),
    )


def position_gains(cfg: ScenarioConfig) -> PositionGains:
    return PositionGains(cfg.controllers.kp, cfg.controllers.kd)


def admittance_params(cfg: ScenarioConfig) -> AdmittanceParams | None:
    c = cfg.controllers
    if not c.has_admittance:
        return None
    return AdmittanceParams(c.admittance_mass, c.admittance_damping, c.admittance_stiffness)


def metrics_context(cfg: ScenarioConfig, workpiece: Workpiece | None = None) -> MetricsContext:
    wp = workpiece if workpiece is not None else build_workpiece(cfg)
    path = build_path(cfg, wp)
    geometry = wp.geometry
    force_ref = None
    if cfg.shared is not None and cfg.mode.value == "SC":
        force_ref = cfg.shared.f_d
    return MetricsContext(
        dt=cfg.dt,
        settle_time=cfg.metrics.settle_time,
        hf_cutoff=cfg.metrics.hf_cutoff,
        contact_threshold=cfg.metrics.contact_threshold,
        force_ref=force_ref,
        initial_bead_volume=wp.initial_bead_volume,
        ref_path=path.point,
        normal_clearance=geometry.clearance,
        surface_normal=geometry.normal_at,
    )
