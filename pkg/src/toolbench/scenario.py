"""Declarative scenario configuration: strict JSON schema with exact field
sets, range validation, and bit-exact round-tripping.

Every error names the offending field path (e.g. "workpiece.grid.pitch").
Unknown fields are rejected so a typo can never silently fall back to a
default.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .teleop import ControlMode

__all__ = ["ConfigError", "ScenarioConfig", "SCHEMA"]

SCHEMA = "toolbench/1"


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class _Walker:
    """Strict dict reader tracking the field path."""

    def __init__(self, data, path: str = ""):
        if not isinstance(data, dict):
            raise ConfigError(path or "<root>", f"expected an object, got {type(data).__name__}")
        self.data = data
        self.path = path
        self.seen: set[str] = set()

    def _p(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def has(self, key: str) -> bool:
        return key in self.data

    def child(self, key: str) -> "_Walker":
        self.seen.add(key)
        if key not in self.data:
            raise ConfigError(self._p(key), "missing required object")
        return _Walker(self.data[key], self._p(key))

    def child_or_none(self, key: str) -> "_Walker | None":
        self.seen.add(key)
        val = self.data.get(key)
        if val is None:
            return None
        return _Walker(val, self._p(key))

    def number(self, key: str, *, minimum=None, maximum=None, exclusive_min=None, default=None) -> float:
        self.seen.add(key)
        if key not in self.data:
            if default is None:
                raise ConfigError(self._p(key), "missing required number")
            return float(default)
        val = self.data[key]
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigError(self._p(key), f"expected a number, got {val!r}")
        val = float(val)
        if val != val or val in (float("inf"), float("-inf")):
            raise ConfigError(self._p(key), "must be finite")
        if exclusive_min is not None and not val > exclusive_min:
            raise ConfigError(self._p(key), f"must be > {exclusive_min}, got {val}")
        if minimum is not None and val < minimum:
            raise ConfigError(self._p(key), f"must be >= {minimum}, got {val}")
        if maximum is not None and val > maximum:
            raise ConfigError(self._p(key), f"must be <= {maximum}, got {val}")
        return val

    def integer(self, key: str, *, minimum=None, default=None) -> int:
        self.seen.add(key)
        if key not in self.data:
            if default is None:
                raise ConfigError(self._p(key), "missing required integer")
            return int(default)
        val = self.data[key]
        if isinstance(val, bool) or not isinstance(val, int):
            raise ConfigError(self._p(key), f"expected an integer, got {val!r}")
        if minimum is not None and val < minimum:
            raise ConfigError(self._p(key), f"must be >= {minimum}, got {val}")
        return val

    def string(self, key: str, *, choices=None, default=None) -> str:
        self.seen.add(key)
        if key not in self.data:
            if default is None:
                raise ConfigError(self._p(key), "missing required string")
            return default
        val = self.data[key]
        if not isinstance(val, str):
            raise ConfigError(self._p(key), f"expected a string, got {val!r}")
        if choices is not None and val not in choices:
            raise ConfigError(self._p(key), f"must be one of {sorted(choices)}, got {val!r}")
        return val

    def boolean(self, key: str, *, default=None) -> bool:
        self.seen.add(key)
        if key not in self.data:
            if default is None:
                raise ConfigError(self._p(key), "missing required boolean")
            return bool(default)
        val = self.data[key]
        if not isinstance(val, bool):
            raise ConfigError(self._p(key), f"expected a boolean, got {val!r}")
        return val

    def vector3(self, key: str, *, default=None) -> tuple:
        self.seen.add(key)
        if key not in self.data:
            if default is None:
                raise ConfigError(self._p(key), "missing required 3-vector")
            return tuple(float(x) for x in default)
        val = self.data[key]
        if not isinstance(val, (list, tuple)) or len(val) != 3:
            raise ConfigError(self._p(key), f"expected [x, y, z], got {val!r}")
        out = []
        for i, x in enumerate(val):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise ConfigError(f"{self._p(key)}[{i}]", f"expected a number, got {x!r}")
            x = float(x)
            if x != x or x in (float("inf"), float("-inf")):
                raise ConfigError(f"{self._p(key)}[{i}]", "must be finite")
            out.append(x)
        return tuple(out)

    def array(self, key: str, *, default=None) -> list:
        self.seen.add(key)
        if key not in self.data:
            if default is None:
                raise ConfigError(self._p(key), "missing required array")
            return list(default)
        val = self.data[key]
        if not isinstance(val, list):
            raise ConfigError(self._p(key), f"expected an array, got {val!r}")
        return val

    def finish(self) -> None:
        unknown = set(self.data) - self.seen
        if unknown:
            key = sorted(unknown)[0]
            raise ConfigError(self._p(key), "unknown field")


@dataclass(frozen=True)
class GeometrySpec:
    kind: str                           # "plane" | "inner_cylinder"
    origin: tuple = (0.0, 0.0, 0.0)     # plane origin / cylinder axis point
    normal: tuple = (0.0, 0.0, 1.0)     # plane normal / cylinder axis dir
    radius: float = 0.0

    @classmethod
    def parse(cls, w: _Walker) -> "GeometrySpec":
        kind = w.string("kind", choices={"plane", "inner_cylinder"})
        if kind == "plane":
            spec = cls(kind, w.vector3("origin"), w.vector3("normal"), 0.0)
        else:
            spec = cls(
                kind,
                w.vector3("axis_point"),
                w.vector3("axis_dir"),
                w.number("radius", exclusive_min=0.0),
            )
        w.finish()
        return spec

    def to_dict(self) -> dict:
        if self.kind == "plane":
            return {"kind": self.kind, "origin": list(self.origin), "normal": list(self.normal)}
        return {
            "kind": self.kind,
            "axis_point": list(self.origin),
            "axis_dir": list(self.normal),
            "radius": self.radius,
        }


@dataclass(frozen=True)
class GridSpec:
    u_min: float
    u_max: float
    v_min: float
    v_max: float
    pitch: float
    wrap_u: bool = False

    @classmethod
    def parse(cls, w: _Walker) -> "GridSpec":
        spec = cls(
            w.number("u_min"),
            w.number("u_max"),
            w.number("v_min"),
            w.number("v_max"),
            w.number("pitch", exclusive_min=0.0),
            w.boolean("wrap_u", default=False),
        )
        if not spec.u_max > spec.u_min:
            raise ConfigError(f"{w.path}.u_max", "must be > u_min")
        if not spec.v_max > spec.v_min:
            raise ConfigError(f"{w.path}.v_max", "must be > v_min")
        w.finish()
        return spec

    def to_dict(self) -> dict:
        return {
            "u_min": self.u_min, "u_max": self.u_max,
            "v_min": self.v_min, "v_max": self.v_max,
            "pitch": self.pitch, "wrap_u": self.wrap_u,
        }


@dataclass(frozen=True)
class RidgeSpec:
    axis: str
    center: float
    height: float
    sigma: float

    @classmethod
    def parse(cls, w: _Walker) -> "RidgeSpec":
        spec = cls(
            w.string("axis", choices={"u", "v"}),
            w.number("center"),
            w.number("height", minimum=0.0),
            w.number("sigma", exclusive_min=0.0),
        )
        w.finish()
        return spec

    def to_dict(self) -> dict:
        return {"axis": self.axis, "center": self.center, "height": self.height, "sigma": self.sigma}


@dataclass(frozen=True)
class WorkpieceSpec:
    geometry: GeometrySpec
    grid: GridSpec
    beads: tuple
    stiffness: float = 2.0e4
    damping: float = 50.0
    friction_mu: float = 0.3
    tangential_deadband: float = 1.0e-4
    preston_k: float = 5.0e-5
    tool_radius: float = 0.01
    grind_vibration: float = 0.0
    grind_vibration_hz: float = 15.0
    grind_vibration_sat: float = 10.0

    @classmethod
    def parse(cls, w: _Walker) -> "WorkpieceSpec":
        beads = []
        for i, item in enumerate(w.array("beads", default=[])):
            beads.append(RidgeSpec.parse(_Walker(item, f"{w.path}.beads[{i}]")))
        spec = cls(
            GeometrySpec.parse(w.child("geometry")),
            GridSpec.parse(w.child("grid")),
            tuple(beads),
            w.number("stiffness", exclusive_min=0.0, default=2.0e4),
            w.number("damping", minimum=0.0, default=50.0),
            w.number("friction_mu", minimum=0.0, default=0.3),
            w.number("tangential_deadband", minimum=0.0, default=1.0e-4),
            w.number("preston_k", minimum=0.0, default=5.0e-5),
            w.number("tool_radius", exclusive_min=0.0, default=0.01),
            w.number("grind_vibration", minimum=0.0, default=0.0),
            w.number("grind_vibration_hz", exclusive_min=0.0, default=15.0),
            w.number("grind_vibration_sat", exclusive_min=0.0, default=10.0),
        )
        w.finish()
        return spec

    def to_dict(self) -> dict:
        return {
            "geometry": self.geometry.to_dict(),
            "grid": self.grid.to_dict(),
            "beads": [b.to_dict() for b in self.beads],
            "stiffness": self.stiffness,
            "damping": self.damping,
            "friction_mu": self.friction_mu,
            "tangential_deadband": self.tangential_deadband,
            "preston_k": self.preston_k,
            "tool_radius": self.tool_radius,
            "grind_vibration": self.grind_vibration,
            "grind_vibration_hz": self.grind_vibration_hz,
            "grind_vibration_sat": self.grind_vibration_sat,
        }


@dataclass(frozen=True)
class BodySpec:
    mass: float
    start_pos: tuple
    f_max: float = 150.0

    @classmethod
    def parse(cls, w: _Walker, *, default_mass: float) -> "BodySpec":
        spec = cls(
            w.number("mass", exclusive_min=0.0, default=default_mass),
            w.vector3("start_pos"),
            w.number("f_max", exclusive_min=0.0, default=150.0),
        )
        w.finish()
        return spec

    def to_dict(self) -> dict:
        return {"mass": self.mass, "start_pos": list(self.start_pos), "f_max": self.f_max}


@dataclass(frozen=True)
class MasterSpec:
    mass: float = 0.5
    damping: float = 5.0
    start_pos: tuple = (0.0, 0.0, 0.0)

    @classmethod
    def parse(cls, w: _Walker) -> "MasterSpec":
        spec = cls(
            w.number("mass", exclusive_min=0.0, default=0.5),
            w.number("damping", minimum=0.0, default=5.0),
            w.vector3("start_pos"),
        )
        w.finish()
        return spec

    def to_dict(self) -> dict:
        return {"mass": self.mass, "damping": self.damping, "start_pos": list(self.start_pos)}


@dataclass(frozen=True)
class ControllersSpec:
    kp: float = 1.0e4
    kd: float = 200.0
    kv: float = 400.0
    admittance_mass: float | None = 4.0
    admittance_damping: float | None = 120.0
    admittance_stiffness: float | None = 500.0
    kfp: float = 2.0e-3
    kfi: float = 4.0e-3
    integral_clamp: float = 50.0

    @property
    def has_admittance(self) -> bool:
        return self.admittance_mass is not None

    @classmethod
    def parse(cls, w: _Walker) -> "ControllersSpec":
        pos = w.child("position")
        kp = pos.number("kp", exclusive_min=0.0, default=1.0e4)
        kd = pos.number("kd", minimum=0.0, default=200.0)
        pos.finish()
        servo = w.child("velocity_servo")
        kv = servo.number("kv", exclusive_min=0.0, default=400.0)
        servo.finish()
        adm = w.child_or_none("admittance")
        if adm is None:
            am = ad = ak = None
        else:
            am = adm.number("mass", exclusive_min=0.0, default=4.0)
            ad = adm.number("damping", minimum=0.0, default=120.0)
            ak = adm.number("stiffness", minimum=0.0, default=500.0)
            adm.finish()
        hyb = w.child("hybrid")
        kfp = hyb.number("kfp", minimum=0.0, default=2.0e-3)
        kfi = hyb.number("kfi", minimum=0.0, default=4.0e-3)
        hyb.finish()
        clamp = w.number("integral_clamp", exclusive_min=0.0, default=50.0)
        w.finish()
        return cls(kp, kd, kv, am, ad, ak, kfp, kfi, clamp)

    def to_dict(self) -> dict:
        adm = None
        if self.has_admittance:
            adm = {
                "mass": self.admittance_mass,
                "damping": self.admittance_damping,
                "stiffness": self.admittance_stiffness,
            }
        return {
            "position": {"kp": self.kp, "kd": self.kd},
            "velocity_servo": {"kv": self.kv},
            "admittance": adm,
            "hybrid": {"kfp": self.kfp, "kfi": self.kfi},
            "integral_clamp": self.integral_clamp,
        }


@dataclass(frozen=True)
class CouplingSpec:
    motion_scale: float = 1.0
    kpp: float = 2000.0
    bpp: float = 20.0
    kff: float = 0.5
    f_m_max: float = 40.0

    @classmethod
    def parse(cls, w: _Walker) -> "CouplingSpec":
        spec = cls(
            w.number("motion_scale", exclusive_min=0.0, default=1.0),
            w.number("kpp", minimum=0.0, default=2000.0),
            w.number("bpp", minimum=0.0, default=20.0),
            w.number("kff", minimum=0.0, default=0.5),
            w.number("f_m_max", exclusive_min=0.0, default=40.0),
        )
        w.finish()
        return spec

    def to_dict(self) -> dict:
        return {
            "motion_scale": self.motion_scale, "kpp": self.kpp, "bpp": self.bpp,
            "kff": self.kff, "f_m_max": self.f_m_max,
        }


@dataclass(frozen=True)
class PathSpec:
    """Straight segment in surface coordinates, traversed at constant speed
    between t_start and t_end; the target holds at the endpoints outside."""

    u0: float
    v0: float
    u1: float
    v1: float
    t_start: float
    t_end: float

    @classmethod
    def parse(cls, w: _Walker) -> "PathSpec":
        spec = cls(
            w.number("u0"), w.number("v0"),
            w.number("u1"), w.number("v1"),
            w.number("t_start", minimum=0.0),
            w.number("t_end"),
        )
        if not spec.t_end > spec.t_start:
            raise ConfigError(f"{w.path}.t_end", "must be > t_start")
        w.finish()
        return spec

    def to_dict(self) -> dict:
        return {
            "u0": self.u0, "v0": self.v0, "u1": self.u1, "v1": self.v1,
            "t_start": self.t_start, "t_end": self.t_end,
        }


@dataclass(frozen=True)
class OperatorSpec:
    kind: str = "scripted"              # "scripted" | "planner"
    path: PathSpec = None
    bandwidth: float = 2.0
    hand_stiffness: float = 800.0
    hand_damping: float = 40.0
    press_bias: float = 10.0
    tremor_amplitude: float = 0.0
    comfort_threshold: float = 15.0
    comfort_window: float = 0.2
    yield_rate: float = 5.0e-4
    recover_rate: float = 2.0
    track_gain: float = 20.0            # 1/s planner tangential correction
    hover: float = 0.0                  # m intent standoff above the surface

    @classmethod
    def parse(cls, w: _Walker) -> "OperatorSpec":
        spec = cls(
            w.string("kind", choices={"scripted", "planner"}, default="scripted"),
            PathSpec.parse(w.child("path")),
            w.number("bandwidth", exclusive_min=0.0, default=2.0),
            w.number("hand_stiffness", exclusive_min=0.0, default=800.0),
            w.number("hand_damping", minimum=0.0, default=40.0),
            w.number("press_bias", minimum=0.0, default=10.0),
            w.number("tremor_amplitude", minimum=0.0, default=0.0),
            w.number("comfort_threshold", exclusive_min=0.0, default=15.0),
            w.number("comfort_window", exclusive_min=0.0, default=0.2),
            w.number("yield_rate", minimum=0.0, default=5.0e-4),
            w.number("recover_rate", minimum=0.0, default=2.0),
            w.number("track_gain", minimum=0.0, default=20.0),
            w.number("hover", default=0.0),
        )
        w.finish()
        return spec

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "path": self.path.to_dict(),
            "bandwidth": self.bandwidth,
            "hand_stiffness": self.hand_stiffness,
            "hand_damping": self.hand_damping,
            "press_bias": self.press_bias,
            "tremor_amplitude": self.tremor_amplitude,
            "comfort_threshold": self.comfort_threshold,
            "comfort_window": self.comfort_window,
            "yield_rate": self.yield_rate,
            "recover_rate": self.recover_rate,
            "track_gain": self.track_gain,
            "hover": self.hover,
        }


@dataclass(frozen=True)
class FixtureSpec:
    k: float = 5000.0
    b: float = 50.0
    side: str = "keep_above"
    offset: float = 0.0                 # m along the workpiece normal

    @classmethod
    def parse(cls, w: _Walker) -> "FixtureSpec":
        spec = cls(
            w.number("k", exclusive_min=0.0, default=5000.0),
            w.number("b", minimum=0.0, default=50.0),
            w.string("side", choices={"keep_above", "keep_below"}, default="keep_above"),
            w.number("offset", default=0.0),
        )
        w.finish()
        return spec

    def to_dict(self) -> dict:
        return {"k": self.k, "b": self.b, "side": self.side, "offset": self.offset}


@dataclass(frozen=True)
class SharedSpec:
    f_d: float = 10.0

    @classmethod
    def parse(cls, w: _Walker) -> "SharedSpec":
        spec = cls(w.number("f_d", minimum=0.0, default=10.0))
        w.finish()
        return spec

    def to_dict(self) -> dict:
        return {"f_d": self.f_d}


@dataclass(frozen=True)
class MetricsSpec:
    settle_time: float = 2.0
    hf_cutoff: float = 10.0
    contact_threshold: float = 0.5

    @classmethod
    def parse(cls, w: "_Walker | None") -> "MetricsSpec":
        if w is None:
            return cls()
        spec = cls(
            w.number("settle_time", minimum=0.0, default=2.0),
            w.number("hf_cutoff", exclusive_min=0.0, default=10.0),
            w.number("contact_threshold", minimum=0.0, default=0.5),
        )
        w.finish()
        return spec

    def to_dict(self) -> dict:
        return {
            "settle_time": self.settle_time,
            "hf_cutoff": self.hf_cutoff,
            "contact_threshold": self.contact_threshold,
        }


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    dt: float
    duration: float
    seed: int
    mode: ControlMode
    workpiece: WorkpieceSpec
    slave: BodySpec
    master: MasterSpec
    controllers: ControllersSpec
    coupling: CouplingSpec
    operator: OperatorSpec
    fixture: FixtureSpec | None = None
    shared: SharedSpec | None = None
    metrics: MetricsSpec = field(default_factory=MetricsSpec)

    @property
    def steps(self) -> int:
        return int(round(self.duration / self.dt))

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        w = _Walker(data)
        schema = w.string("schema")
        if schema != SCHEMA:
            raise ConfigError("schema", f"unsupported schema {schema!r}, expected {SCHEMA!r}")
        mode = w.string("mode", choices={m.value for m in ControlMode})
        fixture_w = w.child_or_none("fixture")
        shared_w = w.child_or_none("shared")
        metrics_w = w.child_or_none("metrics")
        cfg = cls(
            name=w.string("name"),
            dt=w.number("dt", exclusive_min=0.0),
            duration=w.number("duration", minimum=0.0),
            seed=w.integer("seed", minimum=0),
            mode=ControlMode(mode),
            workpiece=WorkpieceSpec.parse(w.child("workpiece")),
            slave=BodySpec.parse(w.child("slave"), default_mass=2.0),
            master=MasterSpec.parse(w.child("master")),
            controllers=ControllersSpec.parse(w.child("controllers")),
            coupling=CouplingSpec.parse(w.child("coupling")),
            operator=OperatorSpec.parse(w.child("operator")),
            fixture=FixtureSpec.parse(fixture_w) if fixture_w is not None else None,
            shared=SharedSpec.parse(shared_w) if shared_w is not None else None,
            metrics=MetricsSpec.parse(metrics_w),
        )
        w.finish()
        cls._check_mode_params(cfg)
        return cfg

    @staticmethod
    def _check_mode_params(cfg: "ScenarioConfig") -> None:
        needs_admittance = cfg.mode in (ControlMode.A, ControlMode.B, ControlMode.VF)
        if needs_admittance and not cfg.controllers.has_admittance:
            raise ConfigError("controllers.admittance", f"required for mode {cfg.mode.value}")
        if cfg.mode is ControlMode.VF and cfg.fixture is None:
            raise ConfigError("fixture", "required for mode VF")
        if cfg.mode is ControlMode.SC and cfg.shared is None:
            raise ConfigError("shared", "required for mode SC")
        if cfg.operator.kind == "planner" and cfg.mode is not ControlMode.SC:
            raise ConfigError("operator.kind", "planner pilot requires mode SC (pure hybrid control)")

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "name": self.name,
            "dt": self.dt,
            "duration": self.duration,
            "seed": self.seed,
            "mode": self.mode.value,
            "workpiece": self.workpiece.to_dict(),
            "slave": self.slave.to_dict(),
            "master": self.master.to_dict(),
            "controllers": self.controllers.to_dict(),
            "coupling": self.coupling.to_dict(),
            "operator": self.operator.to_dict(),
            "fixture": self.fixture.to_dict() if self.fixture else None,
            "shared": self.shared.to_dict() if self.shared else None,
            "metrics": self.metrics.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        return cls.from_dict(json.loads(text))

    def with_mode(self, mode: ControlMode) -> "ScenarioConfig":
        data = self.to_dict()
        data["mode"] = ControlMode(mode).value
        data["name"] = f"{self.name}-{ControlMode(mode).value}"
        return ScenarioConfig.from_dict(data)

    def with_overrides(self, **kwargs) -> "ScenarioConfig":
        """Rebuild through the strict parser with top-level keys replaced."""
        data = self.to_dict()
        data.update(kwargs)
        return ScenarioConfig.from_dict(data)
