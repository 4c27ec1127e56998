"""Actuator plant models: electric, hydraulic and pneumatic families."""

from .disturbance import DisturbanceProfile, DisturbanceSource, sample_disturbance
from .io import default_params, format_params, load_params, parse_params
from .models import (
    PlantModel,
    hda_cylinder_derivative,
    hda_cylinder_flows,
    hda_motor_derivative,
    pda_derivative,
    pmsm_eda_derivative,
    pmsm_velocity_terms,
    universal_motor_derivative,
)
from .params import HdaCylinderParams, HdaMotorParams, PdaParams, PmsmEdaParams, UniversalMotorParams

__all__ = [
    "DisturbanceProfile",
    "DisturbanceSource",
    "HdaCylinderParams",
    "HdaMotorParams",
    "PdaParams",
    "PlantModel",
    "PmsmEdaParams",
    "UniversalMotorParams",
    "default_params",
    "format_params",
    "hda_cylinder_derivative",
    "hda_cylinder_flows",
    "hda_motor_derivative",
    "load_params",
    "parse_params",
    "pda_derivative",
    "pmsm_eda_derivative",
    "pmsm_velocity_terms",
    "sample_disturbance",
    "universal_motor_derivative",
]
