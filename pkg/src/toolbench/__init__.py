"""toolbench: deterministic desk-scale simulator of robotic contact tooling.

Hybrid position-force control, bilateral teleoperation (position-position
and position-force couplings with admittance or stiff inner loops), haptic
virtual fixtures, and shared control, exercised against a penalty-contact
workpiece with grindable weld beads.
"""

from .assist import SharedControlParams, VirtualFixture, fixture_wrench, shared_command
from .contact import ContactState, contact_force, removal_step
from .controllers import (
    AdmittanceParams,
    AdmittanceState,
    HybridGains,
    PositionGains,
    SelectionMatrix,
    admittance_step,
    hybrid_command,
    position_control,
    velocity_to_force,
)
from .engine import RigidPoint, SimState, SimulationFault, integrate_step
from .geometry import (
    BeadField,
    GaussianRidge,
    InnerCylinder,
    Plane,
    Workpiece,
    surface_eval,
    vec3,
)
from .metrics import MetricsContext, MetricsReport, compute_metrics
from .runner import RunResult, StepPipeline, compare_modes, replay_session, run_scenario
from .scenario import ConfigError, ScenarioConfig
from .scenarios import (
    downhole_scenario,
    flat_scenario,
    golden_hashes,
    hybrid_flat_scenario,
    make_scenario,
    scenario_names,
)
from .sigproc import band_energy, smooth_arma
from .teleop import (
    ControlMode,
    CouplingParams,
    OperatorModel,
    OperatorState,
    assemble_mode,
    operator_step,
    pf_coupling,
    pp_coupling,
)
from .trace import SCHEMA, TraceRecord, read_trace, trace_hash, write_trace

__version__ = "0.1.0"
