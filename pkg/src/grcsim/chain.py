"""Subsystem decomposition per actuator family.

Each family is a chain of 3 or 4 first-order subsystems.  Position and
velocity references come from the trajectory; the energy-conversion
references are the controller's own outputs (u_1, and u_2 for the
valve-dynamics hydraulic motor).  The PMSM d-axis loop is a parallel
regulator with reference 0 and its own physical input u_3 = u_d.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .types import PlantFamily, ReferenceFrame, SaturationLimits, subsystem_count


class Routing(enum.Enum):
    TRAJECTORY_POSITION = "trajectory_position"
    TRAJECTORY_VELOCITY = "trajectory_velocity"
    TRAJECTORY_ACCELERATION = "trajectory_acceleration"
    CONTROL_U1 = "control_u1"
    CONTROL_U2 = "control_u2"
    CONSTANT_ZERO = "constant_zero"


_UNSUPPORTED = {"pda_with_valve", "pda_with_valve_dynamics"}


@dataclass(frozen=True)
class SubsystemChain:
    family: PlantFamily
    n: int
    routing: tuple[Routing, ...]
    physical_inputs: tuple[int, ...]
    limits: tuple[SaturationLimits, ...]
    saturated: tuple[bool, ...]

    @property
    def physical_input_index(self) -> int:
        return max(self.physical_inputs)

    @property
    def saturate_u1(self) -> bool:
        return self.saturated[0]

    def limits_for(self, index: int) -> SaturationLimits:
        """Limits of control u_index (index >= 1)."""
        return self.limits[index - 1]


def build_chain(family, limits: Sequence[SaturationLimits], saturate_u1: bool | None = None) -> SubsystemChain:
    """Decomposition of ``family`` with limits for u_1..u_{n-1}.

    ``saturate_u1`` defaults to False where u_1 is only the reference of the
    energy-conversion state and True for the pneumatic chain.  Physical
    inputs are always saturated; u_2 of the valve-dynamics hydraulic motor
    (the spool-opening reference) is saturated as well.
    """
    if isinstance(family, str):
        if family.strip().lower().replace("-", "_") in _UNSUPPORTED:
            raise ValueError("PDA with valve dynamics is not constructible: its plant dynamics are not defined")
        family = PlantFamily.parse(family)
    n = subsystem_count(family)
    limits = tuple(limits)
    if len(limits) != n - 1:
        raise ValueError(f"{family.value} needs {n - 1} saturation limits (u_1..u_{n - 1}), got {len(limits)}")
    if not all(isinstance(lim, SaturationLimits) for lim in limits):
        raise TypeError("limits must be SaturationLimits")

    pos, vel = Routing.TRAJECTORY_POSITION, Routing.TRAJECTORY_VELOCITY
    if family is PlantFamily.PDA_LINEARIZED:
        routing = (pos, vel, Routing.TRAJECTORY_ACCELERATION)
    elif family is PlantFamily.PMSM_EDA:
        routing = (pos, vel, Routing.CONTROL_U1, Routing.CONSTANT_ZERO)
    elif family is PlantFamily.HDA_MOTOR_WITH_VALVE:
        routing = (pos, vel, Routing.CONTROL_U1, Routing.CONTROL_U2)
    else:
        routing = (pos, vel, Routing.CONTROL_U1)

    if family is PlantFamily.PMSM_EDA:
        physical = (2, 3)
    else:
        physical = (n - 1,)

    if saturate_u1 is None:
        saturate_u1 = family is PlantFamily.PDA_LINEARIZED
    saturated = (bool(saturate_u1),) + (True,) * (n - 2)
    return SubsystemChain(family, n, routing, physical, limits, saturated)


def assemble_references(chain: SubsystemChain, trajectory_sample, controls) -> ReferenceFrame:
    """Desired x_1d..x_4d from the trajectory sample and this tick's (u_1, u_2).

    ``controls`` are the values actually passed on (after saturation where
    the chain saturates them).  For the pneumatic chain the acceleration
    reference is the trajectory acceleration plus u_1, so that the velocity
    loop's command reaches the plant.
    """
    x_d, v_d, a_d = trajectory_sample
    u1 = controls[0] if len(controls) > 0 else 0.0
    u2 = controls[1] if len(controls) > 1 else 0.0
    refs = []
    for route in chain.routing[2:]:
        if route is Routing.CONTROL_U1:
            refs.append(u1)
        elif route is Routing.CONTROL_U2:
            refs.append(u2)
        elif route is Routing.TRAJECTORY_ACCELERATION:
            refs.append(a_d + u1)
        else:
            refs.append(0.0 * u1)
    return ReferenceFrame(x_d, v_d, refs[0], refs[1] if len(refs) > 1 else None)
