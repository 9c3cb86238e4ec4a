"""Standard scenario library.

The flat family is one grind pass over three Gaussian bead ridges run under
each control mode; `downhole` is the bore-wall demonstration; `hybrid_flat`
runs the autonomous hybrid controller (velocity planner + force regulation)
on the flat workpiece.  Golden trace hashes for the six standard modes live
in golden.json next to this module.

Parameter values here are the calibrated desk-scale set: they are pinned by
the regression hashes and the acceptance suite, so changing any of them is a
fixture update.
"""

from __future__ import annotations

import importlib.resources
import json

from .scenario import ScenarioConfig

__all__ = [
    "scenario_names",
    "make_scenario",
    "flat_scenario",
    "hybrid_flat_scenario",
    "downhole_scenario",
    "STANDARD_MODES",
    "EXPECTED_ORDERINGS",
    "golden_hashes",
]

STANDARD_MODES = ["A", "B", "C", "D", "VF", "SC"]

# expected metric orderings among the flat-family modes: stiff direct
# reflection builds up force, admittance modes carry the high-frequency
# motion content, the fixture tightens path precision
EXPECTED_ORDERINGS = [
    {"metric": "peak_normal_force", "left": "C", "op": ">", "right": "A"},
    {"metric": "peak_normal_force", "left": "C", "op": ">", "right": "B"},
    {"metric": "hf_band_energy", "left": "A", "op": ">", "right": "D"},
    {"metric": "hf_band_energy", "left": "B", "op": ">", "right": "D"},
    {"metric": "path_rms_normal", "left": "VF", "op": "<", "right": "B"},
]


def _flat_base(mode: str, *, tremor: float = 5.0e-4, seed: int = 2024) -> dict:
    return {
        "schema": "toolbench/1",
        "name": f"flat_{mode.lower()}",
        "dt": 0.001,
        "duration": 20.0,
        "seed": seed,
        "mode": mode,
        "workpiece": {
            "geometry": {"kind": "plane", "origin": [0.0, 0.0, 0.0], "normal": [0.0, 0.0, 1.0]},
            "grid": {"u_min": -0.05, "u_max": 0.35, "v_min": -0.03, "v_max": 0.03,
                     "pitch": 0.001, "wrap_u": False},
            "beads": [
                {"axis": "u", "center": 0.09, "height": 0.002, "sigma": 0.003},
                {"axis": "u", "center": 0.15, "height": 0.002, "sigma": 0.003},
                {"axis": "u", "center": 0.21, "height": 0.002, "sigma": 0.003},
            ],
            "stiffness": 2.0e4,
            "damping": 50.0,
            "friction_mu": 0.3,
            "tangential_deadband": 1.0e-4,
            "preston_k": 5.0e-3,
            "tool_radius": 0.01,
            "grind_vibration": 0.15,
            "grind_vibration_hz": 15.0,
            "grind_vibration_sat": 10.0,
        },
        "slave": {"mass": 2.0, "start_pos": [0.0, 0.0, 0.002], "f_max": 150.0},
        "master": {"mass": 0.5, "damping": 5.0, "start_pos": [0.0, 0.0, 0.002]},
        "controllers": {
            "position": {"kp": 2.5e4, "kd": 400.0},
            "velocity_servo": {"kv": 400.0},
            "admittance": {"mass": 1.0, "damping": 130.0, "stiffness": 4000.0},
            "hybrid": {"kfp": 8.0e-3, "kfi": 4.0e-2},
            "integral_clamp": 50.0,
        },
        "coupling": {"motion_scale": 1.0, "kpp": 2000.0, "bpp": 20.0, "kff": 0.5, "f_m_max": 40.0},
        "operator": {
            "kind": "scripted",
            "path": {"u0": 0.0, "v0": 0.0, "u1": 0.3, "v1": 0.0, "t_start": 1.0, "t_end": 19.0},
            "bandwidth": 2.0,
            "hand_stiffness": 2500.0,
            "hand_damping": 60.0,
            "press_bias": 10.0,
            "tremor_amplitude": tremor,
            "comfort_threshold": 15.0,
            "comfort_window": 0.2,
            "yield_rate": 5.0e-4,
            "recover_rate": 2.0,
            "track_gain": 20.0,
        },
        "fixture": {"k": 2.0e4, "b": 100.0, "side": "keep_above", "offset": 0.0},
        "shared": {"f_d": 10.0},
        "metrics": {"settle_time": 2.0, "hf_cutoff": 10.0, "contact_threshold": 0.5},
    }


def flat_scenario(mode: str = "A") -> ScenarioConfig:
    """Standard flat-plate grind pass in the given control mode."""
    if mode not in STANDARD_MODES:
        raise ValueError(f"unknown standard mode {mode!r}")
    return ScenarioConfig.from_dict(_flat_base(mode))


def hybrid_flat_scenario() -> ScenarioConfig:
    """Autonomous hybrid position-force pass on the flat workpiece: scripted
    velocity planner laterally, 10 N force regulation along the normal."""
    data = _flat_base("SC", tremor=0.0)
    data["name"] = "hybrid_flat"
    data["operator"]["kind"] = "planner"
    data["workpiece"]["grind_vibration"] = 0.0
    return ScenarioConfig.from_dict(data)


def downhole_scenario() -> ScenarioConfig:
    """Bore-wall circumferential weld bead removal (position-position
    teleoperation with an admittance-controlled arm)."""
    radius = 0.15
    circumference = 2.0 * 3.141592653589793 * radius
    data = _flat_base("B", tremor=5.0e-4)
    data["name"] = "downhole"
    data["duration"] = 30.0
    data["workpiece"]["geometry"] = {
        "kind": "inner_cylinder",
        "axis_point": [0.0, 0.0, 0.0],
        "axis_dir": [0.0, 0.0, 1.0],
        "radius": radius,
    }
    data["workpiece"]["grid"] = {
        "u_min": 0.0, "u_max": circumference,
        "v_min": -0.05, "v_max": 0.05,
        "pitch": 0.001, "wrap_u": True,
    }
    # one circumferential ridge around the bore at mid-height
    data["workpiece"]["beads"] = [{"axis": "v", "center": 0.0, "height": 0.002, "sigma": 0.003}]
    # start just off the wall; orbit the full circumference
    data["slave"]["start_pos"] = [radius - 0.002, 0.0, 0.0]
    data["master"]["start_pos"] = [radius - 0.002, 0.0, 0.0]
    data["operator"]["path"] = {
        "u0": 0.0, "v0": 0.0, "u1": circumference, "v1": 0.0,
        "t_start": 1.0, "t_end": 28.0,
    }
    return ScenarioConfig.from_dict(data)


_REGISTRY = {
    "flat_a": lambda: flat_scenario("A"),
    "flat_b": lambda: flat_scenario("B"),
    "flat_c": lambda: flat_scenario("C"),
    "flat_d": lambda: flat_scenario("D"),
    "flat_vf": lambda: flat_scenario("VF"),
    "flat_sc": lambda: flat_scenario("SC"),
    "hybrid_flat": hybrid_flat_scenario,
    "downhole": downhole_scenario,
}


def scenario_names() -> list[str]:
    return list(_REGISTRY)


def make_scenario(name: str) -> ScenarioConfig:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown scenario {name!r}; available: {', '.join(_REGISTRY)}") from None
    return factory()


def golden_hashes() -> dict:
    """Pinned trace hashes for the six standard flat scenarios."""
    ref = importlib.resources.files("toolbench").joinpath("golden.json")
    with ref.open() as f:
        return json.load(f)
