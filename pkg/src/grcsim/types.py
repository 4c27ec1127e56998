"""Shared domain types and the telemetry schema.

Units are SI unless a plant declares instrument units for one of its
energy-conversion states (hydraulic pressures are reported in a pressure
unit such as MPa, for instance); see :mod:`grcsim.plants` for the per-family tables.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np


class PlantFamily(enum.Enum):
    UNIVERSAL_MOTOR_EDA = "universal_motor_eda"
    PMSM_EDA = "pmsm_eda"
    HDA_CYLINDER = "hda_cylinder"
    HDA_MOTOR_WITH_VALVE = "hda_motor_with_valve"
    PDA_LINEARIZED = "pda_linearized"

    @classmethod
    def parse(cls, name: str) -> "PlantFamily":
        key = name.strip().lower().replace("-", "_")
        for member in cls:
            if member.value == key or member.name.lower() == key:
                return member
        raise ValueError(f"unknown plant family {name!r}")


_SUBSYSTEMS = {
    PlantFamily.UNIVERSAL_MOTOR_EDA: 3,
    PlantFamily.PMSM_EDA: 4,
    PlantFamily.HDA_CYLINDER: 3,
    PlantFamily.HDA_MOTOR_WITH_VALVE: 4,
    PlantFamily.PDA_LINEARIZED: 3,
}


def subsystem_count(family: PlantFamily) -> int:
    return _SUBSYSTEMS[family]


@dataclass(frozen=True)
class PlantState:
    """Exported physical state of one actuator (3 or 4 entries)."""

    x: tuple[float, ...]
    t: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        if len(self.x) not in (3, 4):
            raise ValueError(f"state must have 3 or 4 entries, got {len(self.x)}")
        if not all(math.isfinite(v) for v in self.x) or not math.isfinite(self.t):
            raise ValueError("non-finite plant state")


@dataclass(frozen=True)
class ReferenceFrame:
    x1d: float
    x2d: float
    x3d: float
    x4d: float | None = None


@dataclass(frozen=True)
class SaturationLimits:
    u_min: float
    u_max: float

    def __post_init__(self):
        if not (math.isfinite(self.u_min) and math.isfinite(self.u_max)):
            raise ValueError("saturation limits must be finite")
        if not self.u_min < self.u_max:
            raise ValueError(f"u_min < u_max violated: [{self.u_min}, {self.u_max}]")


@dataclass(frozen=True)
class GainSet:
    """Per-subsystem GRC gains, indexed by the controller index 0..n-1."""

    k: tuple[float, ...]
    epsilon: tuple[float, ...]
    gamma: tuple[float, ...]
    delta: tuple[float, ...]

    def __post_init__(self):
        n = len(self.k)
        for name in ("k", "epsilon", "gamma", "delta"):
            vals = tuple(float(v) for v in getattr(self, name))
            object.__setattr__(self, name, vals)
            if len(vals) != n or n not in (3, 4):
                raise ValueError("gain vectors must all have 3 or 4 entries")
            if not all(math.isfinite(v) for v in vals):
                raise ValueError(f"non-finite gain in {name}")
        if any(v < 0 for v in self.k):
            raise ValueError("k must satisfy k >= 0")
        for name in ("epsilon", "gamma", "delta"):
            if any(v <= 0 for v in getattr(self, name)):
                raise ValueError(f"{name} must satisfy {name} > 0")

    @classmethod
    def uniform(cls, n: int, k: float, epsilon: float, gamma: float, delta: float) -> "GainSet":
        return cls((k,) * n, (epsilon,) * n, (gamma,) * n, (delta,) * n)

    @property
    def n(self) -> int:
        return len(self.k)


CSV_COLUMNS: tuple[str, ...] = (
    "t",
    "x1", "x2", "x3", "x4",
    "x1d", "x2d", "x3d", "x4d",
    "e1", "e2", "e3", "e4",
    "z1", "z2", "z3", "z4",
    "u0", "u1", "u2", "u3",
    "su1", "su2", "su3",
    "chi0", "chi1", "chi2", "chi3",
    "d1", "d2", "d3", "d4",
)
COLUMN_INDEX = {name: i for i, name in enumerate(CSV_COLUMNS)}


@dataclass(frozen=True)
class TelemetryRecord:
    """One control tick.  Entries of absent subsystems are 0 and masked out."""

    t: float
    x: tuple[float, float, float, float]
    xd: tuple[float, float, float, float]
    e: tuple[float, float, float, float]
    z: tuple[float, float, float, float]
    u: tuple[float, float, float, float]
    su: tuple[float, float, float]
    chi: tuple[float, float, float, float]
    d: tuple[float, float, float, float]
    present: tuple[bool, bool, bool, bool] = (True, True, True, False)

    @classmethod
    def from_row(cls, row: Sequence[float], n: int = 4) -> "TelemetryRecord":
        r = [float(v) for v in row]
        return cls(
            t=r[0],
            x=tuple(r[1:5]),
            xd=tuple(r[5:9]),
            e=tuple(r[9:13]),
            z=tuple(r[13:17]),
            u=tuple(r[17:21]),
            su=tuple(r[21:24]),
            chi=tuple(r[24:28]),
            d=tuple(r[28:32]),
            present=tuple(j < n for j in range(4)),
        )

    def as_row(self) -> tuple[float, ...]:
        return (self.t, *self.x, *self.xd, *self.e, *self.z, *self.u, *self.su, *self.chi, *self.d)


def _fmt(v: float) -> str:
    # 17 significant digits round-trip every double exactly
    return format(float(v), ".17g")


@dataclass
class Telemetry:
    """Column store of telemetry rows, shape (ticks, 32).

    Behaves as a sequence of :class:`TelemetryRecord`; column access by
    name is the fast path used by metrics and diagnostics.
    """

    data: np.ndarray
    n_subsystems: int = 4
    diverged: bool = False
    diverged_at: int | None = None
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float).reshape(-1, len(CSV_COLUMNS))

    def __len__(self) -> int:
        return self.data.shape[0]

    def __getitem__(self, i: int) -> TelemetryRecord:
        return TelemetryRecord.from_row(self.data[i], self.n_subsystems)

    def __iter__(self) -> Iterator[TelemetryRecord]:
        for i in range(len(self)):
            yield self[i]

    def col(self, name: str) -> np.ndarray:
        return self.data[:, COLUMN_INDEX[name]]

    @property
    def present(self) -> tuple[bool, ...]:
        return tuple(j < self.n_subsystems for j in range(4))

    def z_matrix(self) -> np.ndarray:
        return self.data[:, COLUMN_INDEX["z1"]:COLUMN_INDEX["z1"] + self.n_subsystems]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(CSV_COLUMNS) + "\n")
        # adding 0.0 turns -0.0 into 0.0 so exact zeros print uniformly
        for row in self.data + 0.0:
            buf.write(",".join(_fmt(v) for v in row) + "\n")
        return buf.getvalue()

    def write_csv(self, path: str | Path) -> None:
        # newline="" keeps '\n' on every platform so bytes are stable
        with open(path, "w", newline="", encoding="ascii") as fh:
            fh.write(self.to_csv())

    @classmethod
    def from_csv(cls, text: str, n_subsystems: int = 4) -> "Telemetry":
        lines = text.strip("\n").split("\n")
        header = tuple(lines[0].split(","))
        if header != CSV_COLUMNS:
            raise ValueError("telemetry CSV header does not match the schema")
        rows = [[float(v) for v in line.split(",")] for line in lines[1:]]
        data = np.array(rows, dtype=float) if rows else np.empty((0, len(CSV_COLUMNS)))
        return cls(data, n_subsystems=n_subsystems)

    @classmethod
    def read_csv(cls, path: str | Path, n_subsystems: int = 4) -> "Telemetry":
        return cls.from_csv(Path(path).read_text(encoding="ascii"), n_subsystems)
