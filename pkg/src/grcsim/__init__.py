"""Model-free generic robust control (GRC) simulation for servo actuators."""

from .chain import SubsystemChain, build_chain
from .config import PRESETS, load_preset, parse_config
from .grc import GrcState, PidState, grc_control, grc_tick, pid_tick, tracking_transform
from .reference import QuinticSegment, StepReference, VelocityScript
from .saturation import saturate, sign_select
from .sim import BoundFit, RunMetrics, SimConfig, compute_metrics, fit_convergence_bound, run_closed_loop
from .types import GainSet, PlantFamily, PlantState, ReferenceFrame, SaturationLimits, Telemetry

__version__ = "0.1.0"

__all__ = [
    "BoundFit", "GainSet", "GrcState", "PRESETS", "PidState", "PlantFamily", "PlantState", "QuinticSegment",
    "ReferenceFrame", "RunMetrics", "SaturationLimits", "SimConfig", "StepReference", "SubsystemChain",
    "Telemetry", "VelocityScript", "build_chain", "compute_metrics", "fit_convergence_bound", "grc_control",
    "grc_tick", "load_preset", "parse_config", "pid_tick", "run_closed_loop", "saturate", "sign_select",
    "tracking_transform",
]
