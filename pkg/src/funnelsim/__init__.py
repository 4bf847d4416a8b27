"""Input-bounded funnel tracking control: library, simulation service, CLI."""

from .controller import ControlDiagnostics, ControllerParams, stage1_velocity, stage2_torque, step
from .disturbance import (
    ConstantDisturbance,
    JerkPulse,
    SinusoidDisturbance,
    SumDisturbance,
    ZeroDisturbance,
)
from .errors import ConfigError, SimulationAbort
from .feasibility import (
    FeasibilityBounds,
    StageCheck,
    check_stage1,
    check_stage2,
    default_a_ref_bar,
    max_disturbance,
)
from .funnel import FunnelSpec
from .plants import OmniPlant, ScaraParams, ScaraPlant, omni_rates, scara_accel, scara_matrices
from .reference import CircleJointReference, ConstantReference, SinusoidReference
from .sim import (
    AbortInfo,
    Event,
    Metrics,
    SimConfig,
    Trace,
    compute_metrics,
    detect_events,
    rk4_step,
    run,
    trace_to_csv,
    write_trace_csv,
)
from .transforms import Transform

__version__ = "0.1.0"

__all__ = [
    "AbortInfo",
    "CircleJointReference",
    "ConfigError",
    "ConstantDisturbance",
    "ConstantReference",
    "ControlDiagnostics",
    "ControllerParams",
    "Event",
    "FeasibilityBounds",
    "FunnelSpec",
    "JerkPulse",
    "Metrics",
    "OmniPlant",
    "ScaraParams",
    "ScaraPlant",
    "SimConfig",
    "SimulationAbort",
    "SinusoidDisturbance",
    "SinusoidReference",
    "StageCheck",
    "SumDisturbance",
    "Trace",
    "Transform",
    "ZeroDisturbance",
    "check_stage1",
    "check_stage2",
    "compute_metrics",
    "default_a_ref_bar",
    "detect_events",
    "max_disturbance",
    "omni_rates",
    "rk4_step",
    "run",
    "scara_accel",
    "scara_matrices",
    "stage1_velocity",
    "stage2_torque",
    "step",
    "trace_to_csv",
    "write_trace_csv",
]
